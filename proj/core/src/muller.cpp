#include "ctdta/muller.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "ctdta/errors.hpp"

namespace ctdta {

// ============================================================================
// Accepting BSCCs
// ============================================================================

AcceptingBsccSet accepting_bsccs(const RegionGraph& g, const Dmta& m, MullerMode mode) {
    AcceptingBsccSet out;
    out.in_union.assign(g.size(), false);
    Digraph d = g.digraph();
    for (const auto& b : bottom_sccs(d)) {
        if (b.size() == 1 && d[b.front()].empty()) continue;  // dead end: the run stops
        std::set<int> dta_locs;
        for (int v : b) dta_locs.insert(m.pairs[g.vertices[v].location].second);
        int witness = -1;
        for (std::size_t f = 0; f < m.family.size() && witness < 0; ++f) {
            bool ok;
            if (mode == MullerMode::exact) {
                std::set<int> fam(m.dta_family[f].begin(), m.dta_family[f].end());
                ok = fam == dta_locs;
            } else {
                const auto& lifted = m.family[f];
                ok = std::all_of(b.begin(), b.end(), [&](int v) {
                    return std::binary_search(lifted.begin(), lifted.end(), g.vertices[v].location);
                });
            }
            if (ok) witness = static_cast<int>(f);
        }
        if (witness < 0) continue;
        out.bsccs.push_back(b);
        out.family_index.push_back(witness);
        for (int v : b) out.in_union[v] = true;
    }
    return out;
}

Prepared prepare(const Ctmc& c, const Dta& a, MullerMode mode, ConstantMode constants) {
    Prepared p;
    p.automaton = with_at_least_one_clock(validated(a, &p.warnings));
    const Dta& d = p.automaton;
    p.product = build_product(c, d);
    p.graph = simplify_region_graph(build_region_graph(p.product, constants));
    if (d.acceptance == AcceptanceKind::finite) {
        p.target.resize(p.graph.size());
        for (int v = 0; v < p.graph.size(); ++v) p.target[v] = p.graph.vertices[v].accepting;
        return p;
    }
    p.target = accepting_bsccs(p.graph, p.product, mode).in_union;
    MullerMode other = mode == MullerMode::exact ? MullerMode::containment : MullerMode::exact;
    if (accepting_bsccs(p.graph, p.product, other).in_union != p.target) {
        p.warnings.push_back("exact and containment Muller readings select different accepting BSCCs; using " +
                             std::string(mode == MullerMode::exact ? "exact" : "containment"));
    }
    for (int v = 0; v < p.graph.size(); ++v) p.graph.vertices[v].accepting = p.target[v];
    return p;
}

VerificationReport check_muller(const Ctmc& c, const Dta& a, const MullerOptions& opt) {
    if (a.acceptance != AcceptanceKind::muller) throw UsageError("check_muller needs Muller acceptance");
    VerificationReport r;
    r.acceptance = "muller";
    PhaseTimer timer(r);
    Prepared p = prepare(c, a, opt.mode);
    r.warnings = p.warnings;
    r.locations = p.product.size();
    timer.lap("region_graph");
    if (opt.engine == Engine::single_clock) {
        r.method = "single_clock";
        if (p.product.num_clocks() != 1) throw UsageError("single-clock engine needs exactly one clock");
        r.probability = solve_single_clock_graph(p.graph, p.target, opt.single, r);
    } else {
        r.method = "grid";
        r.vertices = p.graph.size();
        GridResult g = value_iterate(p.product, p.graph, p.target, opt.grid);
        timer.lap("value_iteration");
        r.probability = g.initial_value;
        r.residual = g.residual;
        r.iterations = g.iterations;
        r.converged = g.converged;
        if (!g.converged) r.warnings.push_back("value iteration stopped at n_max before reaching eps_fix");
    }
    return r;
}

// ============================================================================
// Qualitative checks
// ============================================================================

QualitativeResult qualitative_check(const RegionGraph& g, const std::vector<bool>& target,
                                    QualitativeMode mode) {
    QualitativeResult res;
    if (g.initial < 0) return res;
    Digraph d = g.digraph();
    if (mode == QualitativeMode::positive) {
        std::vector<int> parent(g.size(), -2);
        std::deque<int> todo{g.initial};
        parent[g.initial] = -1;
        while (!todo.empty()) {
            int v = todo.front();
            todo.pop_front();
            if (target[v]) {
                res.holds = true;
                for (int w = v; w >= 0; w = parent[w]) res.path.push_back(w);
                std::reverse(res.path.begin(), res.path.end());
                return res;
            }
            for (int w : d[v]) {
                if (parent[w] == -2) {
                    parent[w] = v;
                    todo.push_back(w);
                }
            }
        }
        return res;
    }
    // forall ((exists eventually T) weak-until T)
    std::vector<bool> can = backward_reachable(d, target);
    Digraph stop = d;
    for (int v = 0; v < g.size(); ++v)
        if (target[v]) stop[v].clear();
    std::vector<bool> seen(g.size(), false);
    std::deque<int> todo{g.initial};
    seen[g.initial] = true;
    while (!todo.empty()) {
        int v = todo.front();
        todo.pop_front();
        if (!can[v]) {
            res.violating_vertex = v;
            return res;
        }
        for (int w : stop[v]) {
            if (!seen[w]) {
                seen[w] = true;
                todo.push_back(w);
            }
        }
    }
    res.holds = true;
    return res;
}

static std::string describe_vertex(const RegionGraph& g, int v) {
    const auto& x = g.vertices[v];
    return g.location_names[x.location] + " | " + describe_region(x.region, g.scheme, g.clocks);
}

VerificationReport qualitative_check(const Ctmc& c, const Dta& a, QualitativeMode mode, MullerMode muller) {
    VerificationReport r;
    r.method = "qualitative";
    r.acceptance = a.acceptance == AcceptanceKind::finite ? "finite" : "muller";
    PhaseTimer timer(r);
    Prepared p = prepare(c, a, muller);
    r.warnings = p.warnings;
    r.locations = p.product.size();
    r.vertices = p.graph.size();
    timer.lap("region_graph");
    QualitativeResult q = qualitative_check(p.graph, p.target, mode);
    timer.lap("graph_search");
    QualitativeSummary s;
    s.mode = mode == QualitativeMode::positive ? "positive" : "almost_sure";
    s.holds = q.holds;
    for (int v : q.path) s.witness.push_back(describe_vertex(p.graph, v));
    if (q.violating_vertex >= 0) s.witness.push_back(describe_vertex(p.graph, q.violating_vertex));
    r.qualitative = s;
    r.probability = q.holds ? 1.0 : 0.0;
    return r;
}

}  // namespace ctdta
