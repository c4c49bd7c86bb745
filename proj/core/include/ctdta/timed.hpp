#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ctdta/markov.hpp"

namespace ctdta {

// ============================================================================
// Guards and valuations
// ============================================================================

enum class Cmp { lt, le, gt, ge };

const char* to_string(Cmp op);
Cmp parse_cmp(const std::string& s);  // throws std::invalid_argument

struct ClockAtom {
    int clock = 0;
    Cmp op = Cmp::lt;
    long constant = 0;

    bool operator==(const ClockAtom&) const = default;
};

struct ClockConstraint {
    std::vector<ClockAtom> atoms;  // empty means true

    bool holds(const std::vector<double>& eta) const;
    bool operator==(const ClockConstraint&) const = default;
};

using ClockValuation = std::vector<double>;

// A real interval; `hi` may be +infinity.
struct Interval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false;
    bool hi_open = true;

    bool empty() const { return lo > hi || (lo == hi && (lo_open || hi_open)); }
    bool contains(double v) const;
    double length() const { return empty() ? 0.0 : hi - lo; }
    Interval intersect(const Interval& o) const;
    bool operator==(const Interval&) const = default;
};

// Values of one clock allowed by the atoms of `g` on that clock.
Interval clock_interval(const ClockConstraint& g, int clock);

// Delays τ >= 0 with eta + τ |= g.
Interval guard_enabled_interval(const ClockConstraint& g, const ClockValuation& eta);

// ============================================================================
// Automaton
// ============================================================================

enum class AcceptanceKind { finite, muller };

struct DtaEdge {
    int from = 0;
    Label symbol;
    ClockConstraint guard;
    std::vector<int> resets;
    int to = 0;

    bool operator==(const DtaEdge&) const = default;
};

struct Dta {
    std::vector<std::string> clocks;
    std::vector<std::string> locations;
    int initial = 0;
    AcceptanceKind acceptance = AcceptanceKind::finite;
    std::vector<int> accepting;                  // finite acceptance
    std::vector<std::vector<int>> family;        // Muller acceptance
    std::vector<DtaEdge> edges;

    int num_clocks() const { return static_cast<int>(clocks.size()); }
    int num_locations() const { return static_cast<int>(locations.size()); }
    bool is_accepting(int q) const;
    int location_index(const std::string& name) const;  // -1 if unknown
    int clock_index(const std::string& name) const;     // -1 if unknown

    bool operator==(const Dta&) const = default;
};

struct DeterminismViolation {
    int location = 0;
    Label symbol;
    int edge_a = 0;
    int edge_b = 0;
};

struct DtaDiagnostics {
    Dta normalized;
    std::vector<DeterminismViolation> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

// Structural checks throw ValidationError; determinism overlaps are listed.
DtaDiagnostics validate_dta(const Dta& a);

// validate_dta, throwing ValidationError on any determinism violation.
Dta validated(const Dta& a, std::vector<std::string>* warnings = nullptr);

std::string describe_symbol(const Label& symbol);
std::string describe_guard(const ClockConstraint& g, const std::vector<std::string>& clocks);

struct StepResult {
    int location = 0;
    ClockValuation eta;
};

// std::nullopt means Stuck.
std::optional<StepResult> dta_step(const Dta& a, int q, const ClockValuation& eta,
                                   const Label& symbol, double t);

// ============================================================================
// Time bound
// ============================================================================

struct TimeBounded {
    Dta dta;        // constants already multiplied by `scale`
    long scale = 1; // rates must be divided by this factor
    int bound_clock = 0;
};

// Rational bound given as a decimal; the denominator is found by searching
// scales up to 10^6.
TimeBounded time_bound_transform(const Dta& a, double t_f);

}  // namespace ctdta
