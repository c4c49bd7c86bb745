#pragma once

#include <cstdint>
#include <string>

#include "ctdta/muller.hpp"
#include "ctdta/report.hpp"

namespace ctdta {

enum class SimSemantics {
    paused,   // exposure to the exit rate only accrues while some edge is enabled
    literal,  // plain CTMC sojourns; a jump with no enabled edge rejects
};

struct SimConfig {
    long samples = 100000;
    long max_steps = 10000;
    std::uint64_t seed = 1;
    double confidence = 0.99;
    int threads = 0;                 // 0: hardware concurrency; results do not depend on it
    SimSemantics semantics = SimSemantics::paused;
    MullerMode muller = MullerMode::exact;
    bool prune = true;               // reject as soon as the target becomes unreachable
};

struct Estimate {
    double p = 0.0;          // accepted / decided
    double half_width = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double bracket_low = 0.0;   // undecided counted as rejected
    double bracket_high = 1.0;  // undecided counted as accepted
    long accepted = 0;
    long rejected = 0;
    long undecided = 0;
    std::string interval;    // "wald" or "wilson"
};

Estimate simulate_acceptance(const Ctmc& c, const Dta& a, const SimConfig& cfg = {});

// Confidence interval for `successes` out of `n` (Wald, or Wilson near 0/1).
Estimate binomial_estimate(long successes, long n, double confidence);

VerificationReport simulate_report(const Ctmc& c, const Dta& a, const SimConfig& cfg = {});

}  // namespace ctdta
