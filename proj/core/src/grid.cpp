#include "ctdta/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>

#include "ctdta/errors.hpp"

namespace ctdta {

long ValueField::points() const {
    long n = 1;
    for (long d : dims) n *= d;
    return n;
}

long ValueField::linear(const std::vector<long>& p) const {
    long lin = 0;
    for (std::size_t x = 0; x < dims.size(); ++x) lin += std::min(p[x], dims[x] - 1) * strides[x];
    return lin;
}

namespace {

enum Status : std::uint8_t { normal = 0, pinned_one = 1, pinned_zero = 2 };

// Exponential-weight product integration over one grid segment of length
// h = 1/K: integral_0^h E e^{-E t} (f0 (1 - t/h) + f1 t/h) dt = w0 f0 + w1 f1.
struct SegmentWeights {
    double w0 = 0.0, w1 = 0.0, d = 1.0;

    SegmentWeights(double rate, long k) {
        double z = rate / static_cast<double>(k);
        if (z <= 0.0) return;
        d = std::exp(-z);
        double jump = -std::expm1(-z);
        w1 = z < 1e-4 ? z / 2.0 - z * z / 3.0 + z * z * z / 8.0 : (jump - z * d) / z;
        w0 = std::max(0.0, jump - w1);
        w1 = std::max(0.0, w1);
        // Keep the rounded weights a sub-distribution so values cannot drift above 1.
        while ((w0 + w1) + d > 1.0) d = std::nextafter(d, 0.0);
    }
};

void advance(std::vector<long>& p, const std::vector<long>& dims) {
    for (std::size_t x = 0; x < dims.size(); ++x) {
        if (++p[x] < dims[x]) return;
        p[x] = 0;
    }
}

}  // namespace

GridResult value_iterate(const Dmta& m, const RegionGraph& g, const std::vector<bool>& target,
                         const GridSpec& spec) {
    if (!(spec.h > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (spec.slack < 1) throw std::invalid_argument("clamp slack must be >= 1");
    const int nx = m.num_clocks();
    const int nl = m.size();
    GridResult res;
    ValueField& f = res.field;
    f.k = std::max(1L, std::lround(1.0 / spec.h));
    res.h = 1.0 / static_cast<double>(f.k);
    std::vector<long> clamp(nx);
    for (int x = 0; x < nx; ++x) {
        long top = g.scheme.breakpoints[x].back();
        clamp[x] = top > 0 ? (top + spec.slack) * f.k : 0;
        f.dims.push_back(clamp[x] + 1);
    }
    f.strides.assign(nx, 1);
    for (int x = 1; x < nx; ++x) f.strides[x] = f.strides[x - 1] * f.dims[x - 1];
    const long np = f.points();
    const long n_max = spec.n_max > 0 ? spec.n_max : std::max(10L, 10L * g.size());

    // Classify points through the region graph.
    std::map<std::pair<int, Region>, int> vertex_of;
    for (int v = 0; v < g.size(); ++v) vertex_of[{g.vertices[v].location, g.vertices[v].region}] = v;
    std::vector<bool> can_reach = backward_reachable(g.digraph(), target);
    const bool finite = m.acceptance == AcceptanceKind::finite;

    std::vector<std::vector<std::uint8_t>> status(nl, std::vector<std::uint8_t>(np, normal));
    std::vector<std::vector<std::int16_t>> active(nl, std::vector<std::int16_t>(np, -1));
    std::vector<long> p(nx, 0);
    ClockValuation mid(nx);
    for (long lin = 0; lin < np; ++lin, advance(p, f.dims)) {
        Region r = region_of_scaled(p, f.k, g.scheme);
        // Guards are decided at the midpoint of the segment towards the delay
        // successor; clamped clocks stay put.
        for (int x = 0; x < nx; ++x) {
            bool moving = p[x] < clamp[x];
            mid[x] = (static_cast<double>(p[x]) + (moving ? 0.5 : 0.0)) / static_cast<double>(f.k);
        }
        for (int l = 0; l < nl; ++l) {
            auto it = vertex_of.find({l, r});
            if (it != vertex_of.end()) {
                if (target[it->second]) status[l][lin] = pinned_one;
                else if (!can_reach[it->second]) status[l][lin] = pinned_zero;
            } else if (finite && m.accepting[l]) {
                status[l][lin] = pinned_one;
            }
            for (std::size_t e = 0; e < m.edges[l].size(); ++e) {
                if (m.edges[l][e].guard.holds(mid)) {
                    active[l][lin] = static_cast<std::int16_t>(e);
                    break;
                }
            }
        }
    }

    std::vector<std::vector<double>> cur(nl, std::vector<double>(np, 0.0));
    for (int l = 0; l < nl; ++l)
        for (long lin = 0; lin < np; ++lin)
            if (status[l][lin] == pinned_one) cur[l][lin] = 1.0;
    std::vector<std::vector<double>> next = cur;

    std::vector<SegmentWeights> weights;
    for (int l = 0; l < nl; ++l) weights.emplace_back(m.rates[l], f.k);

    for (res.iterations = 1; res.iterations <= n_max; ++res.iterations) {
        double diff = 0.0;
        for (int l = 0; l < nl; ++l) {
            const auto& w = weights[l];
            const double rate = m.rates[l];
            auto& out = next[l];
            const auto& st = status[l];
            const auto& act = active[l];
            // Walk points from the last linear index down so the delay
            // successor (larger index) is always computed first.
            for (int x = 0; x < nx; ++x) p[x] = f.dims[x] - 1;
            for (long lin = np - 1; lin >= 0; --lin) {
                double val;
                if (st[lin] == pinned_one) {
                    val = 1.0;
                } else if (st[lin] == pinned_zero) {
                    val = 0.0;
                } else {
                    long step = 0;
                    for (int x = 0; x < nx; ++x)
                        if (p[x] < clamp[x]) step += f.strides[x];
                    const int e = act[lin];
                    auto jump_value = [&](long at_lin, long shift) {
                        const auto& edge = m.edges[l][e];
                        long off = 0;
                        for (int x : edge.resets) off += (p[x] + (shift && p[x] < clamp[x] ? 1 : 0)) * f.strides[x];
                        double s = 0.0;
                        for (auto [l2, prob] : edge.dist) s += prob * cur[l2][at_lin - off];
                        return s;
                    };
                    if (step == 0) {
                        val = (e >= 0 && rate > 0.0) ? jump_value(lin, 0) : 0.0;
                    } else if (e < 0 || rate <= 0.0) {
                        val = out[lin + step];
                    } else {
                        val = w.w0 * jump_value(lin, 0) + w.w1 * jump_value(lin + step, 1) +
                              w.d * out[lin + step];
                    }
                }
                out[lin] = val;
                const double old = cur[l][lin];
                if (val < old) res.monotone = false;
                if (val > 1.0) res.bounded = false;
                diff = std::max(diff, std::abs(val - old));
                // decrement multi-index
                for (int x = 0; x < nx; ++x) {
                    if (p[x]-- > 0) break;
                    p[x] = f.dims[x] - 1;
                }
            }
        }
        std::swap(cur, next);
        res.residual = diff;
        if (diff < spec.eps_fix) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) res.iterations = n_max;
    f.values = std::move(cur);
    res.initial_value = f.values[m.initial][0];
    return res;
}

GridResult value_iterate(const Dmta& m, const GridSpec& spec) {
    if (m.acceptance != AcceptanceKind::finite) throw UsageError("value_iterate: finite acceptance expected");
    RegionGraph g = simplify_region_graph(build_region_graph(m));
    std::vector<bool> target(g.size());
    for (int v = 0; v < g.size(); ++v) target[v] = g.vertices[v].accepting;
    return value_iterate(m, g, target, spec);
}

void write_field_csv(const GridResult& r, const Dmta& m, std::ostream& out) {
    const auto& f = r.field;
    out << "location";
    for (const auto& c : m.clocks) out << "," << c;
    out << ",value\n";
    const long np = f.points();
    for (int l = 0; l < m.size(); ++l) {
        std::vector<long> p(f.dims.size(), 0);
        for (long lin = 0; lin < np; ++lin, advance(p, f.dims)) {
            out << '"' << m.names[l] << '"';
            for (long v : p) out << "," << static_cast<double>(v) / static_cast<double>(f.k);
            out << "," << f.values[l][lin] << "\n";
        }
    }
}

Refinement refine(const Dmta& m, const GridSpec& spec) {
    GridSpec fine = spec;
    fine.h = spec.h / 2.0;
    Refinement r;
    r.coarse = value_iterate(m, spec).initial_value;
    r.fine = value_iterate(m, fine).initial_value;
    r.estimate = std::abs(r.fine - r.coarse);
    return r;
}

static VerificationReport run_grid(const Dmta& m, const GridSpec& spec, VerificationReport r,
                                   GridResult* field_out) {
    PhaseTimer timer(r);
    RegionGraph g = simplify_region_graph(build_region_graph(m));
    std::vector<bool> target(g.size());
    for (int v = 0; v < g.size(); ++v) target[v] = g.vertices[v].accepting;
    r.vertices = g.size();
    timer.lap("region_graph");
    GridResult res = value_iterate(m, g, target, spec);
    timer.lap("value_iteration");
    r.probability = res.initial_value;
    r.residual = res.residual;
    r.iterations = res.iterations;
    r.converged = res.converged;
    if (!res.converged) r.warnings.push_back("value iteration stopped at n_max before reaching eps_fix");
    if (!res.monotone) r.warnings.push_back("value iteration was not monotone");
    if (!res.bounded) r.warnings.push_back("value iteration exceeded 1");
    if (field_out) *field_out = std::move(res);
    return r;
}

VerificationReport solve_grid(const Ctmc& c, const Dta& a, const GridSpec& spec, GridResult* field_out) {
    if (a.acceptance != AcceptanceKind::finite)
        throw UsageError("grid reachability needs finite acceptance (use the Muller check)");
    VerificationReport r;
    r.method = "grid";
    r.acceptance = "finite";
    Dta d = validated(a, &r.warnings);
    Dmta m = build_product(c, d);
    r.locations = m.size();
    return run_grid(m, spec, std::move(r), field_out);
}

VerificationReport check_time_bounded(const Ctmc& c, const Dta& a, double t_f, const GridSpec& spec,
                                      GridResult* field_out) {
    VerificationReport r;
    r.method = "grid";
    r.acceptance = "finite";
    r.time_bound = t_f;
    Dta d = validated(a, &r.warnings);
    TimeBounded tb = time_bound_transform(d, t_f);
    Dmta m = with_rates_divided(build_product(c, tb.dta), static_cast<double>(tb.scale));
    r.locations = m.size();
    GridSpec scaled = spec;
    scaled.h = spec.h * static_cast<double>(tb.scale);
    return run_grid(m, scaled, std::move(r), field_out);
}

}  // namespace ctdta
