#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctdta {

struct SimulationSummary {
    long samples = 0;
    long accepted = 0;
    long rejected = 0;
    long undecided = 0;
    double half_width = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double bracket_low = 0.0;
    double bracket_high = 1.0;
    double confidence = 0.99;
    std::string interval;  // "wald" or "wilson"
    unsigned long long seed = 0;
};

struct QualitativeSummary {
    std::string mode;  // "positive" or "almost_sure"
    bool holds = false;
    std::vector<std::string> witness;  // path (positive) or violating vertex (almost_sure)
};

struct VerificationReport {
    double probability = 0.0;
    std::string method;      // single_clock | grid | simulate | qualitative
    std::string acceptance;  // finite | muller
    std::optional<double> error_bound;
    std::optional<double> residual;
    std::optional<long> iterations;
    bool converged = true;
    std::optional<double> time_bound;
    int locations = 0;
    int vertices = 0;
    int subgraphs = 0;
    std::vector<std::pair<std::string, double>> timings_ms;
    std::vector<std::string> warnings;
    std::optional<SimulationSummary> simulation;
    std::optional<QualitativeSummary> qualitative;
};

// Accumulates named phase durations into a report.
class PhaseTimer {
public:
    explicit PhaseTimer(VerificationReport& r) : report_(r), start_(clock::now()) {}
    void lap(const std::string& phase) {
        auto now = clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        report_.timings_ms.emplace_back(phase, ms);
        start_ = now;
    }

private:
    using clock = std::chrono::steady_clock;
    VerificationReport& report_;
    clock::time_point start_;
};

}  // namespace ctdta
