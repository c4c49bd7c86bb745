#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ctdta/product.hpp"

namespace ctdta {

// ============================================================================
// Regions
// ============================================================================

// Breakpoints per clock, ascending and starting at 0. The last breakpoint is
// the clock's maximal constant; values above it are all equivalent. With
// several clocks the breakpoints must be 0,1,..,c so fractional orderings are
// meaningful.
struct RegionScheme {
    std::vector<std::vector<long>> breakpoints;

    int num_clocks() const { return static_cast<int>(breakpoints.size()); }
    int top(int x) const { return static_cast<int>(breakpoints[x].size()) - 1; }
};

enum class ConstantMode {
    per_clock,   // c_x is the largest constant compared with x
    global_max,  // every clock uses the largest constant of the automaton
};

// One clock: breakpoints are 0 and the distinct guard constants. Several
// clocks: unit breakpoints up to the chosen maximum.
RegionScheme make_scheme(const Dmta& m, ConstantMode mode = ConstantMode::per_clock);

// idx[x] = k means the clock lies in [b_k, b_{k+1}) (k < top) or at/above
// b_top (k == top). `classes` orders the clocks strictly inside a bounded
// interval by fractional offset; with `zero_class` set, classes[0] holds the
// clocks sitting exactly on a breakpoint (classic boundary region). A clock
// with idx == top that is not in the zero class is "beyond" and belongs to no
// class. Merged regions never have `zero_class` set; their classes are read
// half-open from below.
struct Region {
    std::vector<int> idx;
    std::vector<std::vector<int>> classes;
    bool zero_class = false;

    bool operator==(const Region&) const = default;
    auto operator<=>(const Region&) const = default;
};

Region zero_region(const RegionScheme& s);
bool is_beyond(const Region& r, const RegionScheme& s, int x);
std::optional<Region> delay_successor(const Region& r, const RegionScheme& s);
Region reset_region(const Region& r, const std::vector<int>& clocks);
bool satisfies(const Region& r, const RegionScheme& s, const ClockConstraint& g);

// Exact classic region of eta (boundary classes kept).
Region classic_region_of(const ClockValuation& eta, const RegionScheme& s);
// Merged region containing eta, i.e. the classic region of eta + 0+.
Region region_of(const ClockValuation& eta, const RegionScheme& s);
// Same for valuation num[x] / den computed with integer arithmetic.
Region region_of_scaled(const std::vector<long>& num, long den, const RegionScheme& s);

std::string describe_region(const Region& r, const RegionScheme& s,
                            const std::vector<std::string>& clocks);

// ============================================================================
// Region graph
// ============================================================================

struct MarkovEdge {
    int target = 0;
    double prob = 0.0;
    std::vector<int> resets;
    int dmta_edge = -1;
};

struct RegionVertex {
    int location = 0;
    Region region;
    double rate = 0.0;       // E(location) if any Markovian edge leaves, else 0
    int delay = -1;          // delay successor vertex
    std::vector<MarkovEdge> markov;
    bool accepting = false;
};

struct RegionGraph {
    RegionScheme scheme;
    std::vector<std::string> clocks;
    std::vector<std::string> location_names;
    std::vector<RegionVertex> vertices;
    int initial = -1;  // -1 when pruning removed everything
    bool simplified = false;

    int size() const { return static_cast<int>(vertices.size()); }
    Digraph digraph() const;  // delay and Markovian edges, duplicates removed
    int find(int location, const Region& r) const;  // -1 if absent
};

RegionGraph build_region_graph(const Dmta& m, const RegionScheme& s);
RegionGraph build_region_graph(const Dmta& m, ConstantMode mode = ConstantMode::per_clock);
RegionGraph simplify_region_graph(const RegionGraph& g);

struct Pruned {
    RegionGraph graph;
    std::vector<int> old_to_new;  // -1 for removed vertices
    std::vector<int> new_to_old;
};

// Keeps vertices forward reachable from the initial vertex (without passing
// through targets) that can also reach a target.
Pruned prune(const RegionGraph& g, const std::vector<bool>& target);

struct GraphStats {
    int vertices = 0;
    int delay_edges = 0;
    int markov_edges = 0;
};
GraphStats stats(const RegionGraph& g);

std::string to_dot(const RegionGraph& g);

// ============================================================================
// PDP view
// ============================================================================

struct PdpState {
    int vertex = 0;
    ClockValuation eta;
};

bool in_invariant(const RegionGraph& g, const PdpState& st);

// Time until the flow leaves the vertex's region; infinity when unbounded.
double boundary_hit_time(const RegionGraph& g, const PdpState& st);

struct JumpPiece {
    double until = std::numeric_limits<double>::infinity();  // piece covers [previous, until)
    double mass = 0.0;                                       // branch mass into A on the piece
};

// integral_0^flat q(t) rate e^{-rate t} dt + boundary_mass e^{-rate flat},
// with q piecewise constant as given by `pieces`.
double embedded_jump_probability(double rate, double flat, const std::vector<JumpPiece>& pieces,
                                 double boundary_mass);

// Same quantity for a state of the region graph and a target vertex set.
double embedded_jump_probability(const RegionGraph& g, const PdpState& st,
                                 const std::vector<bool>& in_target);

struct PdpJump {
    int target = 0;
    double prob = 0.0;
    std::vector<int> resets;
};

struct PdpVertexView {
    double rate = 0.0;
    std::vector<PdpJump> jumps;
    int boundary_target = -1;
};

// Markovian self-loops without reset are removed by thinning the rate, so
// no jump leads back to the same state.
std::vector<PdpVertexView> pdp_view(const RegionGraph& g);

}  // namespace ctdta
