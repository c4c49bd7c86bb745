#include "ctdta/timed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctdta/errors.hpp"

namespace ctdta {

const char* to_string(Cmp op) {
    switch (op) {
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::gt: return ">";
    case Cmp::ge: return ">=";
    }
    return "?";
}

Cmp parse_cmp(const std::string& s) {
    if (s == "<") return Cmp::lt;
    if (s == "<=") return Cmp::le;
    if (s == ">") return Cmp::gt;
    if (s == ">=") return Cmp::ge;
    throw std::invalid_argument("unknown comparator '" + s + "'");
}

static bool compare(double v, Cmp op, double c) {
    switch (op) {
    case Cmp::lt: return v < c;
    case Cmp::le: return v <= c;
    case Cmp::gt: return v > c;
    case Cmp::ge: return v >= c;
    }
    return false;
}

bool ClockConstraint::holds(const std::vector<double>& eta) const {
    for (const auto& a : atoms)
        if (!compare(eta[a.clock], a.op, static_cast<double>(a.constant))) return false;
    return true;
}

bool Interval::contains(double v) const {
    if (v < lo || (v == lo && lo_open)) return false;
    if (v > hi || (v == hi && hi_open)) return false;
    return true;
}

Interval Interval::intersect(const Interval& o) const {
    Interval r;
    if (lo > o.lo) {
        r.lo = lo;
        r.lo_open = lo_open;
    } else if (o.lo > lo) {
        r.lo = o.lo;
        r.lo_open = o.lo_open;
    } else {
        r.lo = lo;
        r.lo_open = lo_open || o.lo_open;
    }
    if (hi < o.hi) {
        r.hi = hi;
        r.hi_open = hi_open;
    } else if (o.hi < hi) {
        r.hi = o.hi;
        r.hi_open = o.hi_open;
    } else {
        r.hi = hi;
        r.hi_open = hi_open || o.hi_open;
    }
    return r;
}

static Interval atom_set(Cmp op, double c) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (op) {
    case Cmp::lt: return {-inf, c, true, true};
    case Cmp::le: return {-inf, c, true, false};
    case Cmp::gt: return {c, inf, true, true};
    case Cmp::ge: return {c, inf, false, true};
    }
    return {};
}

Interval clock_interval(const ClockConstraint& g, int clock) {
    Interval r;  // [0, inf)
    for (const auto& a : g.atoms)
        if (a.clock == clock) r = r.intersect(atom_set(a.op, static_cast<double>(a.constant)));
    return r;
}

Interval guard_enabled_interval(const ClockConstraint& g, const ClockValuation& eta) {
    Interval r;  // [0, inf)
    for (const auto& a : g.atoms)
        r = r.intersect(atom_set(a.op, static_cast<double>(a.constant) - eta[a.clock]));
    return r;
}

// ============================================================================
// Automaton
// ============================================================================

bool Dta::is_accepting(int q) const {
    return std::find(accepting.begin(), accepting.end(), q) != accepting.end();
}

int Dta::location_index(const std::string& name) const {
    auto it = std::find(locations.begin(), locations.end(), name);
    return it == locations.end() ? -1 : static_cast<int>(it - locations.begin());
}

int Dta::clock_index(const std::string& name) const {
    auto it = std::find(clocks.begin(), clocks.end(), name);
    return it == clocks.end() ? -1 : static_cast<int>(it - clocks.begin());
}

std::string describe_symbol(const Label& symbol) {
    std::string s = "{";
    bool first = true;
    for (const auto& ap : symbol) {
        if (!first) s += ",";
        s += ap;
        first = false;
    }
    return s + "}";
}

std::string describe_guard(const ClockConstraint& g, const std::vector<std::string>& clocks) {
    if (g.atoms.empty()) return "true";
    std::string s;
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
        const auto& a = g.atoms[i];
        if (i) s += " && ";
        std::string name = a.clock < static_cast<int>(clocks.size()) ? clocks[a.clock] : "?";
        s += name + to_string(a.op) + std::to_string(a.constant);
    }
    return s;
}

static void check_structure(const Dta& a) {
    const int nq = a.num_locations();
    const int nx = a.num_clocks();
    if (nq == 0) throw ValidationError("dta has no locations");
    if (a.initial < 0 || a.initial >= nq) throw ValidationError("dta initial location out of range");
    for (int q : a.accepting)
        if (q < 0 || q >= nq) throw ValidationError("dta accepting location out of range");
    for (const auto& f : a.family)
        for (int q : f)
            if (q < 0 || q >= nq) throw ValidationError("dta Muller family location out of range");
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        const auto& e = a.edges[i];
        std::string where = "edge " + std::to_string(i);
        if (e.from < 0 || e.from >= nq || e.to < 0 || e.to >= nq)
            throw ValidationError(where + ": location out of range");
        for (int x : e.resets)
            if (x < 0 || x >= nx) throw ValidationError(where + ": reset clock out of range");
        for (const auto& at : e.guard.atoms) {
            if (at.clock < 0 || at.clock >= nx) throw ValidationError(where + ": guard clock out of range");
            if (at.constant < 0) throw ValidationError(where + ": guard constant must be a natural number");
        }
    }
}

DtaDiagnostics validate_dta(const Dta& a) {
    check_structure(a);
    DtaDiagnostics d;
    d.normalized = a;
    Dta& n = d.normalized;

    // Edges out of accepting locations stay in the automaton (their constants
    // still shape the regions), but the product never follows them.
    if (n.acceptance == AcceptanceKind::finite) {
        for (const auto& e : n.edges)
            if (n.is_accepting(e.from))
                d.warnings.push_back("accepting location '" + n.locations[e.from] +
                                     "' is a sink: edge to '" + n.locations[e.to] + "' is never taken");
    }

    const int nx = n.num_clocks();
    for (std::size_t i = 0; i < n.edges.size(); ++i) {
        const auto& e = n.edges[i];
        bool empty = false, thin = false;
        for (int x = 0; x < nx; ++x) {
            Interval iv = clock_interval(e.guard, x);
            if (iv.empty()) empty = true;
            else if (iv.length() == 0.0) thin = true;
        }
        if (empty || thin) {
            d.warnings.push_back("edge " + n.locations[e.from] + " -> " + n.locations[e.to] +
                                 " guard '" + describe_guard(e.guard, n.clocks) + "' " +
                                 (empty ? "is unsatisfiable" : "has measure zero") +
                                 "; Markovian jumps take it with probability 0");
        }
    }

    for (std::size_t i = 0; i < n.edges.size(); ++i) {
        for (std::size_t j = i + 1; j < n.edges.size(); ++j) {
            const auto& e = n.edges[i];
            const auto& f = n.edges[j];
            if (e.from != f.from || e.symbol != f.symbol) continue;
            bool meet = true, interior = true;
            for (int x = 0; x < nx; ++x) {
                Interval iv = clock_interval(e.guard, x).intersect(clock_interval(f.guard, x));
                if (iv.empty()) {
                    meet = false;
                    break;
                }
                if (iv.length() == 0.0) interior = false;
            }
            if (!meet) continue;
            if (interior) {
                d.violations.push_back({e.from, e.symbol, static_cast<int>(i), static_cast<int>(j)});
            } else {
                d.warnings.push_back("edges " + std::to_string(i) + " and " + std::to_string(j) +
                                     " from '" + n.locations[e.from] + "' on " +
                                     describe_symbol(e.symbol) + " overlap on a measure-zero set");
            }
        }
    }
    return d;
}

Dta validated(const Dta& a, std::vector<std::string>* warnings) {
    DtaDiagnostics d = validate_dta(a);
    if (!d.ok()) {
        std::ostringstream os;
        os << "dta is not deterministic:";
        for (const auto& v : d.violations) {
            os << " location '" << d.normalized.locations[v.location] << "' symbol "
               << describe_symbol(v.symbol) << " edges " << v.edge_a << " and " << v.edge_b << ";";
        }
        throw ValidationError(os.str());
    }
    if (warnings) warnings->insert(warnings->end(), d.warnings.begin(), d.warnings.end());
    return d.normalized;
}

std::optional<StepResult> dta_step(const Dta& a, int q, const ClockValuation& eta,
                                   const Label& symbol, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("dta_step: delay must be positive");
    ClockValuation moved = eta;
    for (auto& v : moved) v += t;
    std::optional<StepResult> found;
    for (const auto& e : a.edges) {
        if (e.from != q || e.symbol != symbol || !e.guard.holds(moved)) continue;
        if (found) throw InternalError("dta_step: two edges enabled in location '" + a.locations[q] + "'");
        StepResult r{e.to, moved};
        for (int x : e.resets) r.eta[x] = 0.0;
        found = std::move(r);
    }
    return found;
}

// ============================================================================
// Time bound
// ============================================================================

TimeBounded time_bound_transform(const Dta& a, double t_f) {
    if (!(t_f > 0.0) || !std::isfinite(t_f)) throw std::invalid_argument("time bound must be positive");
    if (a.acceptance != AcceptanceKind::finite)
        throw UsageError("time-bounded checks need finite acceptance");

    long scale = 0;
    for (long k = 1; k <= 1000000; ++k) {
        double v = t_f * static_cast<double>(k);
        if (std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, v)) {
            scale = k;
            break;
        }
    }
    if (scale == 0) throw std::invalid_argument("time bound is not a rational with denominator <= 10^6");

    TimeBounded out;
    out.scale = scale;
    out.dta = a;
    std::string name = "z";
    while (a.clock_index(name) >= 0) name += "'";
    out.dta.clocks.push_back(name);
    out.bound_clock = a.num_clocks();
    const long bound = std::lround(t_f * static_cast<double>(scale));
    for (auto& e : out.dta.edges) {
        for (auto& at : e.guard.atoms) at.constant *= scale;
        if (a.is_accepting(e.to)) e.guard.atoms.push_back({out.bound_clock, Cmp::le, bound});
    }
    return out;
}

}  // namespace ctdta
