#pragma once

#include <iosfwd>
#include <vector>

#include "ctdta/region.hpp"
#include "ctdta/report.hpp"

namespace ctdta {

struct GridSpec {
    double h = 0.01;          // time units; snapped to 1/K for integer K
    double eps_fix = 1e-6;
    long n_max = 0;           // 0 means 10 * (region-graph vertex count)
    long slack = 1;           // clamp = largest breakpoint + slack
};

// Values on the grid {0, 1/K, ..., clamp}^clocks for every product location.
struct ValueField {
    long k = 1;                           // points per time unit
    std::vector<long> dims;               // points per clock
    std::vector<long> strides;
    std::vector<std::vector<double>> values;  // [location][linear point]

    long points() const;
    long linear(const std::vector<long>& p) const;
    double at(int location, const std::vector<long>& p) const { return values[location][linear(p)]; }
};

struct GridResult {
    ValueField field;
    double initial_value = 0.0;
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool monotone = true;     // U^{n+1} >= U^n at every point and step
    bool bounded = true;      // U^n <= 1 everywhere
    double h = 0.0;           // effective step
};

// Least fixpoint of the reachability recursion for the vertex set `target`
// of the simplified, unpruned graph `g` built from `m`.
GridResult value_iterate(const Dmta& m, const RegionGraph& g, const std::vector<bool>& target,
                         const GridSpec& spec);

// Finite acceptance: targets are the accepting locations.
GridResult value_iterate(const Dmta& m, const GridSpec& spec);

void write_field_csv(const GridResult& r, const Dmta& m, std::ostream& out);

struct Refinement {
    double coarse = 0.0;
    double fine = 0.0;
    double estimate = 0.0;  // first-order Richardson estimate of the fine error
};

Refinement refine(const Dmta& m, const GridSpec& spec);

VerificationReport solve_grid(const Ctmc& c, const Dta& a, const GridSpec& spec = {},
                              GridResult* field_out = nullptr);

// Grid solve on C (x) A[t_f]; a lower bound on the unbounded value.
VerificationReport check_time_bounded(const Ctmc& c, const Dta& a, double t_f,
                                      const GridSpec& spec = {}, GridResult* field_out = nullptr);

}  // namespace ctdta
