#pragma once

#include <vector>

#include "ctdta/grid.hpp"
#include "ctdta/region.hpp"
#include "ctdta/report.hpp"
#include "ctdta/single_clock.hpp"

namespace ctdta {

enum class MullerMode {
    exact,        // automaton locations visited by the BSCC equal some F
    containment,  // every vertex's location lies in one lifted S x F
};

struct AcceptingBsccSet {
    std::vector<std::vector<int>> bsccs;  // vertex ids, pairwise disjoint
    std::vector<int> family_index;        // witnessing family member per BSCC
    std::vector<bool> in_union;           // per vertex
};

// `g` is the simplified region graph of the Muller product `m`. BSCCs
// without any outgoing edge are dead ends (finite runs) and never accept.
AcceptingBsccSet accepting_bsccs(const RegionGraph& g, const Dmta& m, MullerMode mode = MullerMode::exact);

enum class Engine { single_clock, grid };

struct MullerOptions {
    Engine engine = Engine::single_clock;
    MullerMode mode = MullerMode::exact;
    SingleClockOptions single;
    GridSpec grid;
};

VerificationReport check_muller(const Ctmc& c, const Dta& a, const MullerOptions& opt = {});

enum class QualitativeMode { positive, almost_sure };

struct QualitativeResult {
    bool holds = false;
    std::vector<int> path;     // positive: initial vertex .. target vertex
    int violating_vertex = -1; // almost_sure: reachable vertex that cannot reach the target
};

// Graph-only decision on the simplified region graph (targets: accepting
// vertices for finite acceptance, accepting BSCCs for Muller).
QualitativeResult qualitative_check(const RegionGraph& g, const std::vector<bool>& target,
                                    QualitativeMode mode);

VerificationReport qualitative_check(const Ctmc& c, const Dta& a, QualitativeMode mode,
                                     MullerMode muller = MullerMode::exact);

// Simplified graph and target set used by every engine for (c, a).
struct Prepared {
    Dta automaton;  // validated, normalized, at least one clock
    Dmta product;
    RegionGraph graph;
    std::vector<bool> target;
    std::vector<std::string> warnings;
};

Prepared prepare(const Ctmc& c, const Dta& a, MullerMode mode = MullerMode::exact,
                 ConstantMode constants = ConstantMode::per_clock);

}  // namespace ctdta
