#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ctdta {

using Label = std::set<std::string>;
using Rng = std::mt19937_64;

// ============================================================================
// Chains
// ============================================================================

struct Ctmc {
    std::vector<std::string> names;
    std::vector<Label> labels;
    Eigen::MatrixXd jump;   // row-stochastic
    Eigen::VectorXd rates;  // exit rates, 1/time
    int initial = 0;

    int size() const { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const;  // -1 if unknown
};

struct Dtmc {
    std::vector<std::string> names;
    Eigen::MatrixXd matrix;
    int initial = 0;

    int size() const { return static_cast<int>(matrix.rows()); }
};

struct TimedPath {
    std::vector<int> states;        // states.size() == sojourns.size() + 1
    std::vector<double> sojourns;
};

struct GeneratorMatrix {
    Eigen::MatrixXd q;
};

// Throws ValidationError describing the first violated invariant.
void validate_ctmc(const Ctmc& c);

Dtmc embedded_dtmc(const Ctmc& c);
GeneratorMatrix generator(const Ctmc& c);

// ============================================================================
// Transient analysis
// ============================================================================

// Uniformization on a (possibly substochastic) jump structure. Rows of `jump`
// may sum to less than one; the missing mass leaves the chain.
Eigen::MatrixXd transient_matrix(const Eigen::VectorXd& rates,
                                 const Eigen::MatrixXd& jump, double t,
                                 double eps);
Eigen::MatrixXd transient_matrix(const Ctmc& c, double t, double eps);

// ============================================================================
// Reachability and graph structure
// ============================================================================

std::vector<double> dtmc_reachability(const Dtmc& d, const std::vector<int>& targets);

// Same linear-equation method on a raw square matrix (substochastic allowed).
std::vector<double> reachability(const Eigen::MatrixXd& p, const std::vector<bool>& target);

using Digraph = std::vector<std::vector<int>>;

std::vector<std::vector<int>> strongly_connected_components(const Digraph& g);
std::vector<std::vector<int>> bottom_sccs(const Digraph& g);

// Vertices from which some vertex in `target` is reachable (targets included).
std::vector<bool> backward_reachable(const Digraph& g, const std::vector<bool>& target);
std::vector<bool> forward_reachable(const Digraph& g, int from);

// ============================================================================
// Sampling
// ============================================================================

TimedPath sample_timed_path(const Ctmc& c, Rng& rng, int max_steps);

// Stream for worker `worker` of a run seeded with `seed`.
Rng derive_stream(std::uint64_t seed, std::uint64_t worker);

}  // namespace ctdta
