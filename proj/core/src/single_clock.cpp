#include "ctdta/single_clock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctdta/errors.hpp"

namespace ctdta {

// ============================================================================
// Partition
// ============================================================================

Partition partition_region_graph(const RegionGraph& g, const std::vector<bool>& target) {
    if (g.scheme.num_clocks() != 1) throw UsageError("single-clock engine needs exactly one clock");
    Partition p;
    p.constants = g.scheme.breakpoints[0];
    const int m = static_cast<int>(p.constants.size()) - 1;
    p.subgraphs.resize(m + 1);
    p.subgraph_of.assign(g.size(), -1);
    p.position_of.assign(g.size(), -1);
    for (int i = 0; i <= m; ++i) {
        p.subgraphs[i].width = i < m ? static_cast<double>(p.constants[i + 1] - p.constants[i])
                                     : std::numeric_limits<double>::infinity();
    }
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        if (x.region.zero_class) throw InternalError("partition needs a simplified region graph");
        int i = x.region.idx[0];
        auto& sg = p.subgraphs[i];
        p.subgraph_of[v] = i;
        p.position_of[v] = static_cast<int>(sg.vertices.size());
        sg.vertices.push_back(v);
        sg.accepting.push_back(target[v]);
        sg.rates.push_back(target[v] ? 0.0 : x.rate);
    }
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        const int i = p.subgraph_of[v];
        auto& sg = p.subgraphs[i];
        const int a = p.position_of[v];
        if (x.delay >= 0) {
            if (p.subgraph_of[x.delay] != i + 1) throw InternalError("delay edge does not enter the next subgraph");
            sg.f.push_back({a, p.position_of[x.delay], 1.0});
        }
        if (target[v]) continue;  // absorbing
        for (const auto& e : x.markov) {
            if (!e.resets.empty()) {
                if (p.subgraph_of[e.target] != 0) throw InternalError("reset edge does not enter G_0");
                sg.b.push_back({a, p.position_of[e.target], e.prob});
            } else {
                if (p.subgraph_of[e.target] != i) throw InternalError("Markovian edge leaves its subgraph");
                sg.m.push_back({a, p.position_of[e.target], e.prob});
            }
        }
    }
    return p;
}

AugmentedChain augmented_ctmc(const Partition& p, int i) {
    if (i < 0 || i >= p.m()) throw std::out_of_range("augmented_ctmc: subgraph index must be < m");
    const auto& sg = p.subgraphs[i];
    const auto& g0 = p.subgraphs[0];
    AugmentedChain c;
    c.k_i = static_cast<int>(sg.vertices.size());
    c.k_0 = static_cast<int>(g0.vertices.size());
    c.vertices = sg.vertices;
    c.vertices.insert(c.vertices.end(), g0.vertices.begin(), g0.vertices.end());
    const int n = c.k_i + c.k_0;
    c.rates = Eigen::VectorXd::Zero(n);
    c.jump = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < c.k_i; ++a) c.rates[a] = sg.rates[a];
    for (const auto& e : sg.m) c.jump(e.from, e.to) += e.prob;
    for (const auto& e : sg.b) c.jump(e.from, c.k_i + e.to) += e.prob;
    return c;
}

Ctmc AugmentedChain::to_ctmc() const {
    const int n = k_i + k_0;
    bool deficit = false;
    for (int a = 0; a < n; ++a)
        if (rates[a] > 0.0 && jump.row(a).sum() < 1.0 - 1e-12) deficit = true;
    const int total = n + (deficit ? 1 : 0);
    Ctmc c;
    c.jump = Eigen::MatrixXd::Zero(total, total);
    c.rates = Eigen::VectorXd::Zero(total);
    for (int a = 0; a < n; ++a) {
        c.names.push_back((a < k_i ? "v" : "v'") + std::to_string(vertices[a]));
        c.labels.emplace_back();
        c.rates[a] = rates[a];
        if (rates[a] > 0.0) {
            c.jump.row(a).head(n) = jump.row(a);
            if (deficit) c.jump(a, n) = std::max(0.0, 1.0 - jump.row(a).sum());
        } else {
            c.jump(a, a) = 1.0;
        }
    }
    if (deficit) {
        c.names.push_back("sink");
        c.labels.emplace_back();
        c.jump(n, n) = 1.0;
    }
    return c;
}

std::vector<SubgraphTransient> compute_transients(const Partition& p, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("compute_transients: eps must lie in (0,1)");
    const double eps_i = eps / static_cast<double>(p.m() + 1);
    std::vector<SubgraphTransient> out;
    for (int i = 0; i < p.m(); ++i) {
        AugmentedChain c = augmented_ctmc(p, i);
        Eigen::MatrixXd t = transient_matrix(c.rates, c.jump, p.subgraphs[i].width, eps_i);
        SubgraphTransient st;
        st.pi = t.topLeftCorner(c.k_i, c.k_i);
        st.pibar = t.topRightCorner(c.k_i, c.k_0);
        st.lost = (Eigen::VectorXd::Ones(c.k_i) - t.topRows(c.k_i).rowwise().sum()).cwiseMax(0.0);
        out.push_back(std::move(st));
    }
    return out;
}

// ============================================================================
// Linear system
// ============================================================================

SingleClockSolution assemble_and_solve(const Partition& p, const std::vector<SubgraphTransient>& tr,
                                       int initial_vertex) {
    const int n = static_cast<int>(p.subgraph_of.size());
    const int m = p.m();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    const auto& v0 = p.subgraphs[0].vertices;

    for (int i = 0; i <= m; ++i) {
        const auto& sg = p.subgraphs[i];
        const int k = static_cast<int>(sg.vertices.size());
        std::vector<int> succ(k, -1);
        if (i < m)
            for (const auto& e : sg.f) succ[e.from] = p.subgraphs[i + 1].vertices[e.to];
        for (int r = 0; r < k; ++r) {
            const int v = sg.vertices[r];
            if (sg.accepting[r]) {
                b[v] = 1.0;
                continue;
            }
            if (i < m) {
                const auto& st = tr[i];
                for (int w = 0; w < k; ++w) {
                    double coef = st.pi(r, w);
                    if (coef == 0.0) continue;
                    if (sg.accepting[w]) b[v] += coef;
                    else if (succ[w] >= 0) a(v, succ[w]) -= coef;
                }
                for (int u = 0; u < static_cast<int>(v0.size()); ++u)
                    if (st.pibar(r, u) != 0.0) a(v, v0[u]) -= st.pibar(r, u);
            } else {
                if (sg.rates[r] <= 0.0) continue;  // never leaves: U = 0
                for (const auto& e : sg.m)
                    if (e.from == r) a(v, sg.vertices[e.to]) -= e.prob;
                for (const auto& e : sg.b)
                    if (e.from == r) a(v, v0[e.to]) -= e.prob;
            }
        }
    }
    Eigen::VectorXd u = a.partialPivLu().solve(b);
    SingleClockSolution sol;
    sol.values.resize(n);
    for (int v = 0; v < n; ++v) {
        if (!std::isfinite(u[v]) || u[v] < -1e-9 || u[v] > 1.0 + 1e-9)
            throw InternalError("single-clock solution outside [0,1]: " + std::to_string(u[v]));
        sol.values[v] = std::clamp(u[v], 0.0, 1.0);
    }
    sol.probability = initial_vertex >= 0 ? sol.values[initial_vertex] : 0.0;
    return sol;
}

// ============================================================================
// Pipeline
// ============================================================================

double solve_single_clock_graph(const RegionGraph& simplified, const std::vector<bool>& target,
                                const SingleClockOptions& opt, VerificationReport& report) {
    PhaseTimer timer(report);
    Pruned pr = prune(simplified, target);
    report.vertices = pr.graph.size();
    timer.lap("prune");
    if (pr.graph.initial < 0) {
        report.subgraphs = 0;
        return 0.0;
    }
    std::vector<bool> t(pr.graph.size());
    for (int v = 0; v < pr.graph.size(); ++v) t[v] = target[pr.new_to_old[v]];
    if (t[pr.graph.initial]) {
        report.subgraphs = 0;
        return 1.0;
    }
    Partition p = partition_region_graph(pr.graph, t);
    report.subgraphs = p.m() + 1;
    timer.lap("partition");
    auto tr = compute_transients(p, opt.eps);
    timer.lap("transients");
    auto sol = assemble_and_solve(p, tr, pr.graph.initial);
    timer.lap("solve");
    report.error_bound = opt.eps;
    return sol.probability;
}

Dta with_at_least_one_clock(const Dta& a) {
    if (a.num_clocks() > 0) return a;
    Dta b = a;
    b.clocks.push_back("x");
    return b;
}

VerificationReport solve_single_clock(const Ctmc& c, const Dta& a, const SingleClockOptions& opt) {
    VerificationReport r;
    r.method = "single_clock";
    r.acceptance = "finite";
    if (a.acceptance != AcceptanceKind::finite)
        throw UsageError("single-clock reachability needs finite acceptance (use the Muller check)");
    if (a.num_clocks() > 1) throw UsageError("single-clock engine needs at most one clock");
    PhaseTimer timer(r);
    Dta d = with_at_least_one_clock(validated(a, &r.warnings));
    Dmta m = build_product(c, d);
    r.locations = m.size();
    timer.lap("product");
    RegionGraph g = simplify_region_graph(build_region_graph(m));
    timer.lap("region_graph");
    std::vector<bool> target(g.size());
    for (int v = 0; v < g.size(); ++v) target[v] = g.vertices[v].accepting;
    r.probability = solve_single_clock_graph(g, target, opt, r);
    return r;
}

}  // namespace ctdta
