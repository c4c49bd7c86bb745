// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "ctdta/grid.hpp"
#include "ctdta/muller.hpp"
#include "ctdta/simulate.hpp"
#include "ctdta/single_clock.hpp"
#include "models.hpp"

using namespace ctdta;
using namespace ctdta::testing;

namespace {

// ============================================================================
// Pinned tolerances
// ============================================================================

constexpr double muller_tol = 1e-6;
constexpr double muller_time_s = 1.0;
constexpr double pdp_tol = 1e-12;
constexpr double closed_form_tol = 1e-9;
constexpr double untimed_tol = 1e-9;
constexpr int untimed_cases = 25;
constexpr double cross_tol = 5e-3;
constexpr double cross_grid_h = 0.005;
constexpr long cross_samples = 1000000;
constexpr std::uint64_t cross_seed = 20240601;
constexpr double single_time_s = 1.0;
constexpr double grid_time_s = 30.0;
constexpr double mc_time_s = 60.0;
constexpr double robot_tol = 1e-2;
constexpr double robot_grid_h = 0.01;
constexpr long robot_samples = 1000000;
constexpr std::uint64_t robot_seed = 424242;
constexpr double positive_threshold = 1e-9;
constexpr double almost_sure_threshold = 1.0 - 1e-6;
constexpr double semigroup_tol = 1e-6;
constexpr double fd_step = 1e-4;
constexpr int transient_cases = 10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s%s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
}

// Grid runs of the whole binary, checked by criterion 7.
struct GridRun {
    std::string name;
    bool monotone;
    bool bounded;
};
std::vector<GridRun> grid_runs;

void record(const std::string& name, const GridResult& g) { grid_runs.push_back({name, g.monotone, g.bounded}); }

std::string label(const RegionGraph& g, int v) {
    return g.location_names[g.vertices[v].location] + " | " +
           describe_region(g.vertices[v].region, g.scheme, g.clocks);
}

using EdgeKey = std::tuple<std::string, std::string, std::string, double, std::vector<int>>;

std::set<EdgeKey> edges_of(const RegionGraph& g) {
    std::set<EdgeKey> out;
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        if (x.delay >= 0) out.insert({"delay", label(g, v), label(g, x.delay), 1.0, {}});
        for (const auto& e : x.markov) out.insert({"markov", label(g, v), label(g, e.target), e.prob, e.resets});
    }
    return out;
}

RegionGraph pruned(const Ctmc& c, const Dta& a, ConstantMode mode) {
    Prepared p = prepare(c, a, MullerMode::exact, mode);
    return prune(p.graph, p.target).graph;
}

}  // namespace

int main() {
    std::printf("acceptance checks\n");

    // ------------------------------------------------------------------------
    report(1, "Muller example equals 1-exp(-r0)", [](Outcome& o) {
        for (double r0 : {0.5, 1.0, 2.0}) {
            auto t0 = Clock::now();
            double p = check_muller(muller_ctmc(r0, 2.0, 3.0, 1.5), muller_dta()).probability;
            double dt = seconds_since(t0);
            double err = std::abs(p - (1.0 - std::exp(-r0)));
            o.detail << " r0=" << r0 << " err=" << err << " t=" << dt << "s;";
            o.require(err <= muller_tol, "error above 1e-6 for r0=" + std::to_string(r0));
            o.require(dt < muller_time_s, "runtime above 1 s");
        }
    });

    // ------------------------------------------------------------------------
    report(2, "embedded jump probability 1/3 + (2/3)exp(-10)", [](Outcome& o) {
        const double expected = 1.0 / 3.0 + 2.0 / 3.0 * std::exp(-10.0);
        double direct = embedded_jump_probability(5.0, 2.0, {JumpPiece{INFINITY, 1.0 / 3.0}}, 1.0);

        // Same quantity read off a region graph: rate 5 on 0<=x<2, a third of
        // the jumps enter A, the boundary at x=2 enters A as well.
        RegionGraph g;
        g.scheme = RegionScheme{{{0, 2}}};
        g.clocks = {"x"};
        g.location_names = {"z0", "A", "B"};
        Region low = region_of({0.0}, g.scheme), high = region_of({2.0}, g.scheme);
        g.vertices = {RegionVertex{0, low, 5.0, 3, {MarkovEdge{1, 1.0 / 3.0, {}, 0}, MarkovEdge{2, 2.0 / 3.0, {}, 0}}, false},
                      RegionVertex{1, low, 0.0, -1, {}, false}, RegionVertex{2, low, 0.0, -1, {}, false},
                      RegionVertex{0, high, 0.0, -1, {}, false}};
        g.initial = 0;
        g.simplified = true;
        double from_graph = embedded_jump_probability(g, {0, {0.0}}, {false, true, false, true});
        o.detail << " direct err=" << std::abs(direct - expected) << " graph err=" << std::abs(from_graph - expected);
        o.require(std::abs(direct - expected) <= pdp_tol, "closed form");
        o.require(std::abs(from_graph - expected) <= pdp_tol, "graph form");
    });

    // ------------------------------------------------------------------------
    report(3, "one-transition model equals 1-exp(-lambda c)", [](Outcome& o) {
        for (auto [lambda, c] : {std::pair<double, long>{1, 1}, {2, 1}, {1, 3}}) {
            double p = solve_single_clock(one_transition_ctmc(lambda), one_transition_dta(c)).probability;
            double err = std::abs(p - (1.0 - std::exp(-lambda * static_cast<double>(c))));
            o.detail << " (" << lambda << "," << c << ") err=" << err << ";";
            o.require(err <= closed_form_tol, "closed form mismatch");
        }
    });

    // ------------------------------------------------------------------------
    report(4, "guard-free automata match untimed reachability", [](Outcome& o) {
        Rng rng(99);
        std::uniform_int_distribution<int> states(2, 10), loc(0, 2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < untimed_cases; ++k) {
            Ctmc c = random_ctmc(rng, states(rng));
            Dta a;
            a.clocks = {"x"};
            a.locations = {"q0", "q1", "qf"};
            a.accepting = {2};
            for (int q = 0; q < 2; ++q)
                for (const Label& l : {Label{"a"}, Label{"b"}, Label{}})
                    if (u(rng) < 0.85) a.edges.push_back(edge(q, l, {}, {}, loc(rng)));
            Dmta m = build_product(c, a);
            std::vector<int> targets;
            for (int l = 0; l < m.size(); ++l)
                if (m.accepting[l]) targets.push_back(l);
            double expected = dtmc_reachability(embedded_product_dtmc(m), targets)[m.initial];
            double got = solve_single_clock(c, a).probability;
            worst = std::max(worst, std::abs(got - expected));
        }
        o.detail << " cases=" << untimed_cases << " max err=" << worst;
        o.require(worst <= untimed_tol, "untimed mismatch");
    });

    // ------------------------------------------------------------------------
    double robot_grid_value = -1.0;
    report(5, "running example: single-clock vs grid vs Monte Carlo", [](Outcome& o) {
        Ctmc c = running_ctmc(1, 2, 3, 4);
        Dta a = running_dta();
        auto t0 = Clock::now();
        double single = solve_single_clock(c, a).probability;
        double t_single = seconds_since(t0);

        t0 = Clock::now();
        GridSpec spec;
        spec.h = cross_grid_h;
        GridResult field;
        double grid = solve_grid(c, a, spec, &field).probability;
        double t_grid = seconds_since(t0);
        record("running example h=0.005", field);

        t0 = Clock::now();
        SimConfig cfg;
        cfg.samples = cross_samples;
        cfg.seed = cross_seed;
        double mc = simulate_acceptance(c, a, cfg).p;
        double t_mc = seconds_since(t0);

        o.detail << " single=" << single << " (" << t_single << "s) grid=" << grid << " (" << t_grid
                 << "s) mc=" << mc << " (" << t_mc << "s)";
        o.require(std::abs(single - grid) <= cross_tol, "grid disagrees");
        o.require(std::abs(single - mc) <= cross_tol, "Monte Carlo disagrees");
        o.require(t_single < single_time_s, "single-clock too slow");
        o.require(t_grid < grid_time_s, "grid too slow");
        o.require(t_mc < mc_time_s, "Monte Carlo too slow");
    });

    // ------------------------------------------------------------------------
    report(6, "two-clock robot: grid vs Monte Carlo", [&robot_grid_value](Outcome& o) {
        Ctmc c = robot_ctmc();
        Dta a = robot_dta();
        auto t0 = Clock::now();
        GridSpec spec;
        spec.h = robot_grid_h;
        GridResult field;
        VerificationReport r = solve_grid(c, a, spec, &field);
        double t_grid = seconds_since(t0);
        record("robot h=0.01", field);
        robot_grid_value = r.probability;

        t0 = Clock::now();
        SimConfig cfg;
        cfg.samples = robot_samples;
        cfg.seed = robot_seed;
        Estimate e = simulate_acceptance(c, a, cfg);
        double t_mc = seconds_since(t0);
        o.detail << " grid=" << r.probability << " (" << t_grid << "s, converged=" << r.converged
                 << ") mc=" << e.p << " +-" << e.half_width << " (" << t_mc << "s)";
        o.require(std::abs(r.probability - e.p) <= robot_tol, "engines disagree");
    });

    // ------------------------------------------------------------------------
    report(7, "value iteration is monotone and bounded by 1", [](Outcome& o) {
        GridSpec spec;
        spec.h = 0.01;
        record("one transition", value_iterate(build_product(one_transition_ctmc(1.0), one_transition_dta(1)), spec));
        record("two-clock example", value_iterate(build_product(two_clock_ctmc(), validated(two_clock_dta())), spec));
        for (double t : {1.0, 2.5, 4.0}) {
            GridResult g;
            check_time_bounded(running_ctmc(), running_dta(), t, spec, &g);
            record("running example t_f=" + std::to_string(t), g);
        }
        Prepared p = prepare(muller_ctmc(), muller_dta());
        record("Muller example", value_iterate(p.product, p.graph, p.target, spec));
        for (const auto& run : grid_runs) {
            o.require(run.monotone, run.name + " not monotone");
            o.require(run.bounded, run.name + " exceeds 1");
        }
        o.detail << " grid runs=" << grid_runs.size();
    });

    // ------------------------------------------------------------------------
    report(8, "qualitative answers agree with probabilities", [&robot_grid_value](Outcome& o) {
        struct Case {
            std::string name;
            Ctmc c;
            Dta a;
            double p;
        };
        std::vector<Case> cases;
        auto exact = [](const Ctmc& c, const Dta& a) {
            if (a.acceptance == AcceptanceKind::muller) return check_muller(c, a).probability;
            return solve_single_clock(c, a).probability;
        };
        auto add = [&](const std::string& n, const Ctmc& c, const Dta& a) { cases.push_back({n, c, a, exact(c, a)}); };
        add("running", running_ctmc(), running_dta());
        for (long c : {1, 3}) add("one transition c=" + std::to_string(c), one_transition_ctmc(1.0), one_transition_dta(c));
        Dta unreachable = running_dta();
        unreachable.edges[2].symbol = {"z"};
        add("unreachable", running_ctmc(), unreachable);
        Dta initial = running_dta();
        initial.initial = 1;
        add("accepting initial", running_ctmc(), initial);
        add("Muller", muller_ctmc(), muller_dta());
        add("small Muller", make_ctmc({{"s0", {"a"}, 1.0}, {"s1", {"b"}, 2.0}, {"s2", {"c"}, 1.0}},
                                      {{0, 1, 0.5}, {0, 2, 0.5}, {1, 0, 1.0}, {2, 0, 1.0}}),
            small_muller_dta());
        GridSpec spec;
        spec.h = 0.01;
        cases.push_back({"two-clock", two_clock_ctmc(), two_clock_dta(),
                         solve_grid(two_clock_ctmc(), two_clock_dta(), spec).probability});
        if (robot_grid_value >= 0.0) cases.push_back({"robot", robot_ctmc(), robot_dta(), robot_grid_value});
        Rng rng(5);
        for (int k = 0; k < 6; ++k) {
            Ctmc c = random_ctmc(rng, 3 + k);
            Dta a;
            a.clocks = {"x"};
            a.locations = {"q0", "qf"};
            a.accepting = {1};
            a.edges = {edge(0, {"a"}, {atom(0, Cmp::lt, 1)}, {0}, 0), edge(0, {}, {}, {}, 0),
                       edge(0, {"b"}, {atom(0, Cmp::gt, 1)}, {}, 1)};
            add("random " + std::to_string(k), c, a);
        }
        int checked = 0;
        for (const auto& k : cases) {
            bool pos = qualitative_check(k.c, k.a, QualitativeMode::positive).qualitative->holds;
            bool as = qualitative_check(k.c, k.a, QualitativeMode::almost_sure).qualitative->holds;
            o.require(pos == (k.p > positive_threshold), k.name + ": positive check disagrees");
            if (as) o.require(k.p >= almost_sure_threshold, k.name + ": almost-sure but p=" + std::to_string(k.p));
            ++checked;
        }
        o.detail << " models=" << checked;
    });

    // ------------------------------------------------------------------------
    report(9, "transient analysis: semigroup and Kolmogorov equation", [](Outcome& o) {
        Rng rng(77);
        std::uniform_int_distribution<int> size(2, 8);
        double worst_sg = 0.0, worst_ratio = 0.0;
        for (int k = 0; k < transient_cases; ++k) {
            Ctmc c = random_ctmc(rng, size(rng));
            const double t1 = 0.3 + 0.2 * k, t2 = 0.7;
            Eigen::MatrixXd a = transient_matrix(c, t1, 1e-14), b = transient_matrix(c, t2, 1e-14);
            Eigen::MatrixXd ab = transient_matrix(c, t1 + t2, 1e-14);
            worst_sg = std::max(worst_sg, (ab - a * b).cwiseAbs().maxCoeff());

            // (Pi(t+h) - Pi(t)) / h = Pi(t) Q + O(h); the remainder is at most
            // h/2 * ||Q||^2 in the row-sum norm.
            Eigen::MatrixXd q = generator(c).q;
            Eigen::MatrixXd ah = transient_matrix(c, t1 + fd_step, 1e-14);
            double fd_err = ((ah - a) / fd_step - a * q).cwiseAbs().rowwise().sum().maxCoeff();
            double qn = q.cwiseAbs().rowwise().sum().maxCoeff();
            double bound = fd_step / 2.0 * qn * qn + 1e-8;
            worst_ratio = std::max(worst_ratio, fd_err / bound);
        }
        o.detail << " max semigroup err=" << worst_sg << " max fd err / bound=" << worst_ratio;
        o.require(worst_sg <= semigroup_tol, "semigroup");
        o.require(worst_ratio <= 1.0, "finite difference not O(h)");
    });

    // ------------------------------------------------------------------------
    report(10, "region graphs of the running and two-clock examples", [](Outcome& o) {
        RegionGraph g = pruned(running_ctmc(1, 2, 3, 4), running_dta(), ConstantMode::per_clock);
        std::set<std::tuple<std::string, double, bool>> vertices;
        for (int v = 0; v < g.size(); ++v)
            vertices.insert({label(g, v), g.vertices[v].rate, g.vertices[v].accepting});
        std::set<std::tuple<std::string, double, bool>> want_v{
            {"<s0,q0> | 0<=x<1", 1, false}, {"<s0,q0> | 1<=x<2", 1, false},
            {"<s1,q0> | 0<=x<1", 2, false}, {"<s1,q0> | 1<=x<2", 2, false},
            {"<s2,q0> | 0<=x<1", 0, false}, {"<s2,q0> | 1<=x<2", 3, false},
            {"<s2,q0> | x>=2", 3, false},   {"<s2,q1> | 1<=x<2", 0, true},
            {"<s2,q1> | x>=2", 0, true}};
        std::set<EdgeKey> want_e{
            {"delay", "<s0,q0> | 0<=x<1", "<s0,q0> | 1<=x<2", 1.0, {}},
            {"delay", "<s1,q0> | 0<=x<1", "<s1,q0> | 1<=x<2", 1.0, {}},
            {"delay", "<s2,q0> | 0<=x<1", "<s2,q0> | 1<=x<2", 1.0, {}},
            {"delay", "<s2,q0> | 1<=x<2", "<s2,q0> | x>=2", 1.0, {}},
            {"delay", "<s2,q1> | 1<=x<2", "<s2,q1> | x>=2", 1.0, {}},
            {"markov", "<s0,q0> | 0<=x<1", "<s1,q0> | 0<=x<1", 1.0, {}},
            {"markov", "<s0,q0> | 1<=x<2", "<s1,q0> | 0<=x<1", 1.0, {0}},
            {"markov", "<s1,q0> | 0<=x<1", "<s0,q0> | 0<=x<1", 0.5, {}},
            {"markov", "<s1,q0> | 0<=x<1", "<s2,q0> | 0<=x<1", 0.2, {}},
            {"markov", "<s1,q0> | 1<=x<2", "<s0,q0> | 0<=x<1", 0.5, {0}},
            {"markov", "<s1,q0> | 1<=x<2", "<s2,q0> | 0<=x<1", 0.2, {0}},
            {"markov", "<s2,q0> | 1<=x<2", "<s2,q1> | 1<=x<2", 1.0, {}},
            {"markov", "<s2,q0> | x>=2", "<s2,q1> | x>=2", 1.0, {}}};
        o.require(g.size() == 9, "running example vertex count");
        o.require(vertices == want_v, "running example vertices or rates");
        o.require(edges_of(g) == want_e, "running example edges");
        o.detail << " running: " << g.size() << " vertices, " << edges_of(g).size() << " edges;";

        // two-clock example, with every clock bounded by the largest constant
        RegionGraph h = pruned(two_clock_ctmc(), two_clock_dta(), ConstantMode::global_max);
        std::set<std::tuple<std::string, double, bool>> hv;
        for (int v = 0; v < h.size(); ++v) hv.insert({label(h, v), h.vertices[v].rate, h.vertices[v].accepting});
        std::set<std::tuple<std::string, double, bool>> want_hv{
            {"<s0,q0> | 0<=x1<1, 0<=x2<1; frac x1=x2", 0, false},
            {"<s0,q0> | 1<=x1<2, 1<=x2<2; frac x1=x2", 1, false},
            {"<s0,q0> | x1>=2, x2>=2", 1, false},
            {"<s1,q1> | 0<=x1<1, 1<=x2<2; frac x1<x2", 0, true},
            {"<s1,q1> | 0<=x1<1, x2>=2", 0, true}};
        std::set<EdgeKey> drawn{
            {"delay", "<s0,q0> | 0<=x1<1, 0<=x2<1; frac x1=x2", "<s0,q0> | 1<=x1<2, 1<=x2<2; frac x1=x2", 1.0, {}},
            {"delay", "<s0,q0> | 1<=x1<2, 1<=x2<2; frac x1=x2", "<s0,q0> | x1>=2, x2>=2", 1.0, {}},
            {"markov", "<s0,q0> | 1<=x1<2, 1<=x2<2; frac x1=x2", "<s1,q1> | 0<=x1<1, 1<=x2<2; frac x1<x2", 1.0, {0}},
            {"markov", "<s0,q0> | x1>=2, x2>=2", "<s1,q1> | 0<=x1<1, x2>=2", 1.0, {0}}};
        std::set<EdgeKey> got = edges_of(h);
        std::set<EdgeKey> extra;
        for (const auto& e : got)
            if (!drawn.count(e)) extra.insert(e);
        bool all_drawn = std::all_of(drawn.begin(), drawn.end(), [&](const EdgeKey& e) { return got.count(e) > 0; });
        o.require(h.size() == 5, "two-clock vertex count");
        o.require(hv == want_hv, "two-clock vertices or rates");
        o.require(all_drawn, "two-clock drawn edges");
        // the only edge beyond the drawn ones is the delay step between the two
        // accepting vertices, which carries no probability mass
        bool extra_ok = extra.size() <= 1;
        for (const auto& e : extra)
            extra_ok = extra_ok && std::get<0>(e) == "delay" && std::get<1>(e).rfind("<s1,q1>", 0) == 0;
        o.require(extra_ok, "unexpected two-clock edges");
        o.detail << " two-clock: " << h.size() << " vertices, " << got.size() << " edges (" << extra.size()
                 << " delay edge between accepting vertices not drawn in the reference)";
    });

    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
