#include "ctdta/product.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "ctdta/errors.hpp"

namespace ctdta {

int Dmta::find(int state, int location) const {
    for (int i = 0; i < size(); ++i)
        if (pairs[i].first == state && pairs[i].second == location) return i;
    return -1;
}

Dmta build_product(const Ctmc& c, const Dta& a) {
    const int nq = a.num_locations();
    std::vector<int> index(static_cast<std::size_t>(c.size()) * nq, -1);
    Dmta m;
    m.clocks = a.clocks;
    m.acceptance = a.acceptance;
    m.dta_family = a.family;
    m.constants.assign(a.num_clocks(), {});
    for (const auto& e : a.edges)
        for (const auto& at : e.guard.atoms) m.constants[at.clock].push_back(at.constant);
    for (auto& cs : m.constants) {
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    }
    const bool finite = a.acceptance == AcceptanceKind::finite;

    std::deque<int> todo;
    auto intern = [&](int s, int q) {
        int& slot = index[static_cast<std::size_t>(s) * nq + q];
        if (slot < 0) {
            slot = m.size();
            m.pairs.push_back({s, q});
            m.names.push_back("<" + c.names[s] + "," + a.locations[q] + ">");
            m.rates.push_back(c.rates[s]);
            m.edges.emplace_back();
            todo.push_back(slot);
        }
        return slot;
    };
    m.initial = intern(c.initial, a.initial);
    while (!todo.empty()) {
        int l = todo.front();
        todo.pop_front();
        auto [s, q] = m.pairs[l];
        if (finite && a.is_accepting(q)) continue;  // accepting locations are sinks
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const auto& e = a.edges[ei];
            if (e.from != q || e.symbol != c.labels[s]) continue;
            DmtaEdge de;
            de.guard = e.guard;
            de.resets = e.resets;
            de.dta_edge = static_cast<int>(ei);
            for (int t = 0; t < c.size(); ++t) {
                double p = c.jump(s, t);
                if (p > 0.0) de.dist.push_back({intern(t, e.to), p});
            }
            m.edges[l].push_back(std::move(de));
        }
    }

    m.accepting.assign(m.size(), false);
    if (a.acceptance == AcceptanceKind::finite) {
        for (int l = 0; l < m.size(); ++l) m.accepting[l] = a.is_accepting(m.pairs[l].second);
    } else {
        for (const auto& f : a.family) {
            std::vector<int> lifted;
            for (int l = 0; l < m.size(); ++l)
                if (std::find(f.begin(), f.end(), m.pairs[l].second) != f.end()) lifted.push_back(l);
            m.family.push_back(std::move(lifted));
        }
    }
    return m;
}

Dmta with_rates_divided(Dmta m, double divisor) {
    for (auto& r : m.rates) r /= divisor;
    return m;
}

std::vector<long> max_constants(const Dmta& m) {
    std::vector<long> c(m.num_clocks(), 0);
    for (std::size_t x = 0; x < m.constants.size() && x < c.size(); ++x)
        for (long k : m.constants[x]) c[x] = std::max(c[x], k);
    for (const auto& es : m.edges)
        for (const auto& e : es)
            for (const auto& at : e.guard.atoms) c[at.clock] = std::max(c[at.clock], at.constant);
    return c;
}

Dtmc embedded_product_dtmc(const Dmta& m) {
    const int n = m.size();
    Dtmc d;
    d.names = m.names;
    d.initial = m.initial;
    d.matrix = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l) {
        if (m.edges[l].empty() || m.rates[l] <= 0.0) {
            d.matrix(l, l) = 1.0;
            continue;
        }
        if (m.edges[l].size() > 1)
            throw UsageError("embedded_product_dtmc: location " + m.names[l] + " has several edges");
        for (auto [t, p] : m.edges[l].front().dist) d.matrix(l, t) += p;
    }
    return d;
}

// ============================================================================
// Path measure
// ============================================================================

namespace {

struct Enabled {
    std::vector<Interval> per_edge;  // enabled delay interval of each edge

    double exposure(double tau) const {
        double sum = 0.0;
        for (const auto& iv : per_edge) {
            if (iv.empty() || tau <= iv.lo) continue;
            sum += std::min(tau, iv.hi) - iv.lo;
        }
        return sum;
    }
};

Enabled enabled_at(const Dmta& m, int ell, const ClockValuation& eta) {
    Enabled en;
    for (const auto& e : m.edges[ell]) en.per_edge.push_back(guard_enabled_interval(e.guard, eta));
    return en;
}

double branch_probability(const DmtaEdge& e, int target) {
    double p = 0.0;
    for (auto [t, q] : e.dist)
        if (t == target) p += q;
    return p;
}

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 30);
}

struct Cylinder {
    const Dmta& m;
    const std::vector<int>& locs;
    const std::vector<Interval>& ivs;
    CylinderOptions opt;

    double value(int i, const ClockValuation& eta, int depth) const {
        const int n = static_cast<int>(ivs.size());
        if (i == n) return 1.0;
        const int ell = locs[i];
        const double rate = m.rates[ell];
        if (rate <= 0.0) return 0.0;
        Enabled en = enabled_at(m, ell, eta);
        double total = 0.0;
        for (std::size_t k = 0; k < m.edges[ell].size(); ++k) {
            const auto& e = m.edges[ell][k];
            double p = branch_probability(e, locs[i + 1]);
            if (p == 0.0) continue;
            Interval j = ivs[i].intersect(en.per_edge[k]);
            if (j.empty() || j.length() == 0.0) continue;
            const double base = std::exp(-rate * en.exposure(j.lo));
            bool all_reset = static_cast<int>(e.resets.size()) >= m.num_clocks();
            if (i + 1 == n || all_reset) {
                double mass = std::isinf(j.hi) ? base : base * (1.0 - std::exp(-rate * (j.hi - j.lo)));
                ClockValuation zero(eta.size(), 0.0);
                total += p * mass * (i + 1 == n ? 1.0 : value(i + 1, zero, depth));
                continue;
            }
            if (depth + 1 > opt.max_depth)
                throw UsageError("cylinder_probability: nesting depth exceeds limit " +
                                 std::to_string(opt.max_depth));
            double hi = std::isinf(j.hi) ? j.lo + 34.0 / rate : j.hi;
            auto f = [&](double tau) {
                ClockValuation next = eta;
                for (auto& v : next) v += tau;
                for (int x : e.resets) next[x] = 0.0;
                return rate * base * std::exp(-rate * (tau - j.lo)) * value(i + 1, next, depth + 1);
            };
            // Integrand is smooth between points where a clock (shifted by a
            // later interval endpoint) crosses an integer.
            std::vector<double> offsets{0.0};
            for (int later = i + 1; later < n; ++later) {
                if (std::isfinite(ivs[later].lo)) offsets.push_back(ivs[later].lo);
                if (std::isfinite(ivs[later].hi)) offsets.push_back(ivs[later].hi);
            }
            std::vector<double> cuts{j.lo, hi};
            for (double v : eta) {
                for (double o : offsets) {
                    for (double k = std::ceil(v + o + j.lo); k - v - o < hi && cuts.size() < 4000; k += 1.0) {
                        double tau = k - v - o;
                        if (tau > j.lo) cuts.push_back(tau);
                    }
                }
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            double sum = 0.0;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                // Evaluate just inside each piece so one-sided limits are used.
                double a = cuts[c], b = cuts[c + 1];
                double shrink = 1e-12 * std::max(1.0, b - a);
                sum += adaptive_simpson(f, a + shrink, b - shrink, opt.tolerance / cuts.size());
            }
            total += p * sum;
        }
        return total;
    }
};

}  // namespace

double one_jump_probability(const Dmta& m, int ell, int ell_next, const ClockValuation& eta,
                            const Interval& interval) {
    const double rate = m.rates[ell];
    if (rate <= 0.0) return 0.0;
    Enabled en = enabled_at(m, ell, eta);
    double total = 0.0;
    for (std::size_t k = 0; k < m.edges[ell].size(); ++k) {
        double p = branch_probability(m.edges[ell][k], ell_next);
        if (p == 0.0) continue;
        Interval j = interval.intersect(en.per_edge[k]);
        if (j.empty()) continue;
        double base = std::exp(-rate * en.exposure(j.lo));
        double mass = std::isinf(j.hi) ? base : base * (1.0 - std::exp(-rate * (j.hi - j.lo)));
        total += p * mass;
    }
    return total;
}

double cylinder_probability(const Dmta& m, const std::vector<int>& locations,
                            const std::vector<Interval>& intervals, const ClockValuation& eta0,
                            const CylinderOptions& opt) {
    if (intervals.empty()) return 1.0;
    if (locations.size() != intervals.size() + 1)
        throw std::invalid_argument("cylinder_probability: need one more location than intervals");
    Cylinder cyl{m, locations, intervals, opt};
    return cyl.value(0, eta0, 0);
}

}  // namespace ctdta
