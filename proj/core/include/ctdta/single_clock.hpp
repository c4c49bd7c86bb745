#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctdta/region.hpp"
#include "ctdta/report.hpp"

namespace ctdta {

struct WeightedEdge {
    int from = 0;  // position inside the source subgraph
    int to = 0;    // position inside the target subgraph
    double prob = 1.0;
};

struct Subgraph {
    std::vector<int> vertices;        // region-graph vertex ids, V_i
    std::vector<bool> accepting;      // per position
    std::vector<double> rates;        // Lambda per position (0 for absorbing accepting ones)
    std::vector<WeightedEdge> m;      // Markovian, no reset, inside V_i
    std::vector<WeightedEdge> b;      // Markovian with reset, into V_0
    std::vector<WeightedEdge> f;      // delay, into V_{i+1}
    double width = 0.0;               // c_{i+1} - c_i, infinite for the last one
};

struct Partition {
    std::vector<long> constants;      // c_0 .. c_m
    std::vector<Subgraph> subgraphs;  // G_0 .. G_m
    std::vector<int> subgraph_of;     // per region-graph vertex
    std::vector<int> position_of;     // per region-graph vertex

    int m() const { return static_cast<int>(subgraphs.size()) - 1; }
};

// `g` must be a simplified single-clock graph; `target` marks vertices made
// absorbing with value 1.
Partition partition_region_graph(const RegionGraph& g, const std::vector<bool>& target);

// Chain over V_i followed by absorbing copies of V_0. Rows may be
// substochastic where Markovian mass leaves towards pruned vertices.
struct AugmentedChain {
    int k_i = 0;
    int k_0 = 0;
    std::vector<int> vertices;  // region-graph ids, V_i then V_0
    Eigen::VectorXd rates;
    Eigen::MatrixXd jump;

    Ctmc to_ctmc() const;  // appends an absorbing sink when rows are deficient
};

AugmentedChain augmented_ctmc(const Partition& p, int i);

struct SubgraphTransient {
    Eigen::MatrixXd pi;     // k_i x k_i
    Eigen::MatrixXd pibar;  // k_i x k_0
    Eigen::VectorXd lost;   // mass that left towards pruned vertices
};

std::vector<SubgraphTransient> compute_transients(const Partition& p, double eps);

struct SingleClockSolution {
    std::vector<double> values;  // per region-graph vertex, U(v, c_i)
    double probability = 0.0;
};

SingleClockSolution assemble_and_solve(const Partition& p, const std::vector<SubgraphTransient>& tr,
                                       int initial_vertex);

struct SingleClockOptions {
    double eps = 1e-12;
};

// Exact reachability of `target` on a simplified single-clock graph; fills
// statistics and timings of `report`.
double solve_single_clock_graph(const RegionGraph& simplified, const std::vector<bool>& target,
                                const SingleClockOptions& opt, VerificationReport& report);

VerificationReport solve_single_clock(const Ctmc& c, const Dta& a, const SingleClockOptions& opt = {});

// Adds an unused clock when the automaton has none, so that the single-clock
// pipeline applies.
Dta with_at_least_one_clock(const Dta& a);

}  // namespace ctdta
