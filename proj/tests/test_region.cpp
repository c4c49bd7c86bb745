#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "ctdta/region.hpp"
#include "models.hpp"

using namespace ctdta;
using namespace ctdta::testing;

namespace {

std::vector<bool> accepting_of(const RegionGraph& g) {
    std::vector<bool> t(g.size());
    for (int v = 0; v < g.size(); ++v) t[v] = g.vertices[v].accepting;
    return t;
}

std::string label(const RegionGraph& g, int v) {
    return g.location_names[g.vertices[v].location] + " " +
           describe_region(g.vertices[v].region, g.scheme, g.clocks);
}

using EdgeKey = std::tuple<std::string, std::string, std::string, double>;  // kind, from, to, prob

std::set<EdgeKey> edges_of(const RegionGraph& g) {
    std::set<EdgeKey> out;
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        if (x.delay >= 0) out.insert({"delay", label(g, v), label(g, x.delay), 1.0});
        for (const auto& e : x.markov)
            out.insert({e.resets.empty() ? "markov" : "markov-reset", label(g, v), label(g, e.target), e.prob});
    }
    return out;
}

RegionGraph pruned_graph(const Ctmc& c, const Dta& a, ConstantMode mode = ConstantMode::per_clock) {
    Dmta m = build_product(c, validated(a));
    RegionGraph g = simplify_region_graph(build_region_graph(m, mode));
    return prune(g, accepting_of(g)).graph;
}

}  // namespace

// ============================================================================
// Regions
// ============================================================================

TEST(Regions, MergedRegionOfValuations) {
    RegionScheme one{{{0, 1, 2}}};
    std::vector<std::string> x{"x"};
    EXPECT_EQ(describe_region(region_of({0.0}, one), one, x), "0<=x<1");
    EXPECT_EQ(describe_region(region_of({1.0}, one), one, x), "1<=x<2");
    EXPECT_EQ(describe_region(region_of({3.7}, one), one, x), "x>=2");
    EXPECT_EQ(classic_region_of({0.0}, one), zero_region(one));
    EXPECT_FALSE(region_of({0.0}, one).zero_class);
}

TEST(Regions, EqualFractionsStayTogether) {
    RegionScheme two{{{0, 1, 2}, {0, 1, 2}}};
    Region r = region_of({1.0, 1.0}, two);
    EXPECT_EQ(r.idx, (std::vector<int>{1, 1}));
    ASSERT_EQ(r.classes.size(), 1u);
    EXPECT_EQ(r.classes[0].size(), 2u);
    for (int k = 1; k <= 10; ++k) {
        double eps = 0.09 * k / 10.0;
        EXPECT_EQ(region_of({1.0 + eps, 1.0 + eps}, two), r);
    }
    EXPECT_NE(region_of({1.2, 1.1}, two), r);
    EXPECT_NE(region_of({1.2, 1.1}, two), region_of({1.1, 1.2}, two));
}

TEST(Regions, ScaledLookupMatchesFloatingPoint) {
    RegionScheme two{{{0, 1, 2}, {0, 1, 2, 3}}};
    // eighths are exact in binary, so both lookups see the same fractions
    for (long a = 0; a < 32; ++a)
        for (long b = 0; b < 32; b += 3)
            EXPECT_EQ(region_of_scaled({a, b}, 8, two), region_of({a / 8.0, b / 8.0}, two));
}

TEST(Regions, SuccessorsAndGuards) {
    RegionScheme one{{{0, 1, 2}}};
    Region r = region_of({0.0}, one);
    ClockConstraint lt1{{atom(0, Cmp::lt, 1)}}, gt1{{atom(0, Cmp::gt, 1)}};
    EXPECT_TRUE(satisfies(r, one, lt1));
    EXPECT_FALSE(satisfies(r, one, gt1));
    auto s = delay_successor(classic_region_of({0.5}, one), one);
    ASSERT_TRUE(s);
    EXPECT_EQ(*s, classic_region_of({1.0}, one));
    EXPECT_TRUE(s->zero_class);
    EXPECT_EQ(reset_region(region_of({1.5}, one), {0}), classic_region_of({0.0}, one));
    EXPECT_FALSE(delay_successor(region_of({5.0}, one), one));
}

// ============================================================================
// Region graphs
// ============================================================================

TEST(RegionGraph, RunningExampleReproduced) {
    RegionGraph g = pruned_graph(running_ctmc(1, 2, 3, 4), running_dta());
    ASSERT_EQ(g.size(), 9);

    std::map<std::string, double> rates;
    for (int v = 0; v < g.size(); ++v) rates[label(g, v)] = g.vertices[v].rate;
    std::map<std::string, double> expected{
        {"<s0,q0> 0<=x<1", 1}, {"<s0,q0> 1<=x<2", 1}, {"<s1,q0> 0<=x<1", 2}, {"<s1,q0> 1<=x<2", 2},
        {"<s2,q0> 0<=x<1", 0}, {"<s2,q0> 1<=x<2", 3}, {"<s2,q0> x>=2", 3},
        {"<s2,q1> 1<=x<2", 0}, {"<s2,q1> x>=2", 0}};
    EXPECT_EQ(rates, expected);
    EXPECT_EQ(label(g, g.initial), "<s0,q0> 0<=x<1");

    std::set<EdgeKey> want{
        {"delay", "<s0,q0> 0<=x<1", "<s0,q0> 1<=x<2", 1.0},
        {"delay", "<s1,q0> 0<=x<1", "<s1,q0> 1<=x<2", 1.0},
        {"delay", "<s2,q0> 0<=x<1", "<s2,q0> 1<=x<2", 1.0},
        {"delay", "<s2,q0> 1<=x<2", "<s2,q0> x>=2", 1.0},
        {"delay", "<s2,q1> 1<=x<2", "<s2,q1> x>=2", 1.0},
        {"markov", "<s0,q0> 0<=x<1", "<s1,q0> 0<=x<1", 1.0},
        {"markov-reset", "<s0,q0> 1<=x<2", "<s1,q0> 0<=x<1", 1.0},
        {"markov", "<s1,q0> 0<=x<1", "<s0,q0> 0<=x<1", 0.5},
        {"markov", "<s1,q0> 0<=x<1", "<s2,q0> 0<=x<1", 0.2},
        {"markov-reset", "<s1,q0> 1<=x<2", "<s0,q0> 0<=x<1", 0.5},
        {"markov-reset", "<s1,q0> 1<=x<2", "<s2,q0> 0<=x<1", 0.2},
        {"markov", "<s2,q0> 1<=x<2", "<s2,q1> 1<=x<2", 1.0},
        {"markov", "<s2,q0> x>=2", "<s2,q1> x>=2", 1.0}};
    EXPECT_EQ(edges_of(g), want);
}

TEST(RegionGraph, TwoClockExampleReproduced) {
    RegionGraph g = pruned_graph(two_clock_ctmc(), two_clock_dta(), ConstantMode::global_max);
    ASSERT_EQ(g.size(), 5);
    GraphStats st = stats(g);
    EXPECT_EQ(st.markov_edges, 2);

    int zero_rate = 0, accepting = 0;
    for (const auto& v : g.vertices) {
        if (v.rate == 0.0) ++zero_rate;
        if (v.accepting) {
            ++accepting;
            EXPECT_EQ(v.rate, 0.0);
            EXPECT_TRUE(v.markov.empty());
        }
    }
    EXPECT_EQ(accepting, 2);
    EXPECT_EQ(zero_rate, 3);  // initial region and the two accepting ones
    EXPECT_EQ(g.vertices[g.initial].rate, 0.0);

    // initial -> middle -> top delay chain in the non-accepting location,
    // each later vertex reaching an accepting vertex with a reset of x1
    int v0 = g.initial, v1 = g.vertices[v0].delay;
    ASSERT_GE(v1, 0);
    int v2 = g.vertices[v1].delay;
    ASSERT_GE(v2, 0);
    for (int v : {v1, v2}) {
        ASSERT_EQ(g.vertices[v].markov.size(), 1u);
        EXPECT_EQ(g.vertices[v].markov[0].resets, std::vector<int>{0});
        EXPECT_EQ(g.vertices[v].markov[0].prob, 1.0);
        EXPECT_TRUE(g.vertices[g.vertices[v].markov[0].target].accepting);
    }
    EXPECT_NE(g.vertices[v1].markov[0].target, g.vertices[v2].markov[0].target);
}

TEST(RegionGraph, PerClockConstantsGiveFinerGraph) {
    RegionGraph g = pruned_graph(two_clock_ctmc(), two_clock_dta());
    EXPECT_LE(g.size(), 5);
    EXPECT_GE(g.size(), 3);
}

TEST(RegionGraph, ClockWithoutConstantsHasOneRegion) {
    Ctmc c = make_ctmc({{"s", {"a"}, 1.0}}, {{0, 0, 1.0}});
    Dta a;
    a.clocks = {"x"};
    a.locations = {"q"};
    a.acceptance = AcceptanceKind::muller;
    a.family = {{0}};
    a.edges = {edge(0, {"a"}, {}, {}, 0)};
    RegionGraph g = simplify_region_graph(build_region_graph(build_product(c, a)));
    ASSERT_EQ(g.size(), 1);
    EXPECT_EQ(describe_region(g.vertices[0].region, g.scheme, g.clocks), "x>=0");
    EXPECT_EQ(g.vertices[0].rate, 1.0);
}

TEST(RegionGraph, SimplificationContractsBoundaries) {
    Dmta m = build_product(running_ctmc(), running_dta());
    RegionGraph full = build_region_graph(m);
    RegionGraph simple = simplify_region_graph(full);
    EXPECT_GT(full.size(), simple.size());
    for (const auto& v : simple.vertices) EXPECT_FALSE(v.region.zero_class);
    RegionGraph again = simplify_region_graph(simple);
    EXPECT_EQ(again.size(), simple.size());
    EXPECT_EQ(edges_of(again), edges_of(simple));
}

TEST(RegionGraph, DotExportMentionsEveryVertex) {
    RegionGraph g = pruned_graph(running_ctmc(), running_dta());
    std::string dot = to_dot(g);
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    for (int v = 0; v < g.size(); ++v)
        EXPECT_NE(dot.find(g.location_names[g.vertices[v].location]), std::string::npos);
}

// ============================================================================
// PDP view
// ============================================================================

TEST(Pdp, BoundaryHitTimes) {
    RegionGraph g = pruned_graph(running_ctmc(), running_dta());
    int v0 = g.initial;
    EXPECT_DOUBLE_EQ(boundary_hit_time(g, {v0, {0.0}}), 1.0);
    EXPECT_DOUBLE_EQ(boundary_hit_time(g, {v0, {0.25}}), 0.75);
    EXPECT_TRUE(in_invariant(g, {v0, {0.25}}));
    EXPECT_FALSE(in_invariant(g, {v0, {1.25}}));
    for (int v = 0; v < g.size(); ++v)
        if (label(g, v) == "<s2,q0> x>=2") EXPECT_TRUE(std::isinf(boundary_hit_time(g, {v, {7.0}})));

    RegionGraph two;
    two.scheme = RegionScheme{{{0, 1, 2}, {0, 1}}};
    two.clocks = {"x", "y"};
    two.location_names = {"l"};
    two.vertices.push_back(RegionVertex{0, region_of({1.2, 0.5}, two.scheme), 0.0, -1, {}, false});
    two.initial = 0;
    EXPECT_NEAR(boundary_hit_time(two, {0, {1.2, 0.5}}), 0.5, 1e-12);

    RegionGraph wide;
    wide.scheme = RegionScheme{{{0, 2}}};
    wide.clocks = {"x"};
    wide.location_names = {"l"};
    wide.vertices.push_back(RegionVertex{0, region_of({0.0}, wide.scheme), 0.0, -1, {}, false});
    EXPECT_DOUBLE_EQ(boundary_hit_time(wide, {0, {0.0}}), 2.0);
}

TEST(Pdp, EmbeddedJumpProbability) {
    const double third = 1.0 / 3.0;
    EXPECT_NEAR(embedded_jump_probability(5.0, 2.0, {JumpPiece{INFINITY, third}}, 1.0),
                third + 2.0 / 3.0 * std::exp(-10.0), 1e-12);
    EXPECT_DOUBLE_EQ(embedded_jump_probability(0.0, 2.0, {JumpPiece{INFINITY, third}}, 0.7), 0.7);
    EXPECT_NEAR(embedded_jump_probability(3.0, INFINITY, {JumpPiece{INFINITY, 0.4}}, 0.0), 0.4, 1e-12);
}

TEST(Pdp, GraphJumpProbabilityFromInitialVertex) {
    // From the initial vertex of the running example at x = 0: the jump goes to
    // <s1,q0> 0<=x<1 with probability 1 - e^{-r0}, else the flow reaches 1<=x<2.
    RegionGraph g = pruned_graph(running_ctmc(1, 2, 3, 4), running_dta());
    std::vector<bool> target(g.size(), false);
    for (int v = 0; v < g.size(); ++v) target[v] = label(g, v) == "<s1,q0> 0<=x<1";
    EXPECT_NEAR(embedded_jump_probability(g, {g.initial, {0.0}}, target), 1.0 - std::exp(-1.0), 1e-12);
    std::vector<bool> succ(g.size(), false);
    succ[g.vertices[g.initial].delay] = true;
    EXPECT_NEAR(embedded_jump_probability(g, {g.initial, {0.0}}, succ), std::exp(-1.0), 1e-12);
}

TEST(Pdp, SelfLoopsAreThinned) {
    Ctmc c = make_ctmc({{"s", {"a"}, 2.0}, {"t", {"b"}, 1.0}}, {{0, 0, 0.5}, {0, 1, 0.5}, {1, 1, 1.0}});
    Dta a;
    a.clocks = {"x"};
    a.locations = {"q", "f"};
    a.accepting = {1};
    a.edges = {edge(0, {"a"}, {}, {}, 0), edge(0, {"b"}, {}, {}, 1)};
    RegionGraph g = simplify_region_graph(build_region_graph(build_product(c, a)));
    auto view = pdp_view(g);
    const auto& v = view[g.initial];
    EXPECT_DOUBLE_EQ(v.rate, 1.0);
    ASSERT_EQ(v.jumps.size(), 1u);
    EXPECT_DOUBLE_EQ(v.jumps[0].prob, 1.0);
}
