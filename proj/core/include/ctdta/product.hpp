#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctdta/markov.hpp"
#include "ctdta/timed.hpp"

namespace ctdta {

struct DmtaEdge {
    ClockConstraint guard;
    std::vector<int> resets;
    std::vector<std::pair<int, double>> dist;  // (target location, probability)
    int dta_edge = -1;                          // provenance only
};

struct Dmta {
    std::vector<std::string> clocks;
    std::vector<std::pair<int, int>> pairs;  // (ctmc state, dta location)
    std::vector<std::string> names;          // "<s,q>"
    std::vector<double> rates;
    std::vector<std::vector<DmtaEdge>> edges;
    int initial = 0;
    AcceptanceKind acceptance = AcceptanceKind::finite;
    std::vector<bool> accepting;              // finite: S x Q_F
    std::vector<std::vector<int>> family;     // Muller: lifted S x F, one entry per F
    std::vector<std::vector<int>> dta_family; // the automaton's own family, for projection
    std::vector<std::vector<long>> constants; // per clock, every guard constant of the automaton

    int size() const { return static_cast<int>(pairs.size()); }
    int num_clocks() const { return static_cast<int>(clocks.size()); }
    int find(int state, int location) const;  // -1 if not reachable
};

// Reachable part of C (x) A. `a` must already be validated.
Dmta build_product(const Ctmc& c, const Dta& a);

// Divides every exit rate by `divisor` (time rescaling for scaled constants).
Dmta with_rates_divided(Dmta m, double divisor);

// Largest constant compared with each clock (0 when the clock is never tested).
std::vector<long> max_constants(const Dmta& m);

// Untimed jump chain of the product: each location follows its (single,
// guard-free) edge; locations without edges or with rate 0 are absorbing.
Dtmc embedded_product_dtmc(const Dmta& m);

// ============================================================================
// Path measure
// ============================================================================

// Jump-time law of one sojourn: exposure only accrues while some outgoing
// edge is enabled, so the returned probability is
//   sum_e zeta_e(ell') * integral over I and en_e of E exp(-E * exposure(tau)).
double one_jump_probability(const Dmta& m, int ell, int ell_next, const ClockValuation& eta,
                            const Interval& interval);

struct CylinderOptions {
    int max_depth = 4;      // nested quadratures allowed
    double tolerance = 1e-8;
};

double cylinder_probability(const Dmta& m, const std::vector<int>& locations,
                            const std::vector<Interval>& intervals, const ClockValuation& eta0,
                            const CylinderOptions& opt = {});

}  // namespace ctdta
