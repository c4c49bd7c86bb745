#include "ctdta/simulate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "ctdta/errors.hpp"

namespace ctdta {

Estimate binomial_estimate(long successes, long n, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0,1)");
    Estimate e;
    if (n <= 0) {
        e.interval = "none";
        return e;
    }
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
    const double nn = static_cast<double>(n);
    e.p = static_cast<double>(successes) / nn;
    if (e.p < 0.01 || e.p > 0.99) {
        double z2 = z * z;
        double denom = 1.0 + z2 / nn;
        double center = (e.p + z2 / (2.0 * nn)) / denom;
        double half = z / denom * std::sqrt(e.p * (1.0 - e.p) / nn + z2 / (4.0 * nn * nn));
        e.ci_low = std::max(0.0, center - half);
        e.ci_high = std::min(1.0, center + half);
        if (successes == 0) e.ci_low = 0.0;  // exact endpoints, free of rounding
        if (successes == n) e.ci_high = 1.0;
        e.half_width = (e.ci_high - e.ci_low) / 2.0;
        e.interval = "wilson";
    } else {
        e.half_width = z * std::sqrt(e.p * (1.0 - e.p) / nn);
        e.ci_low = std::max(0.0, e.p - e.half_width);
        e.ci_high = std::min(1.0, e.p + e.half_width);
        e.interval = "wald";
    }
    return e;
}

namespace {

enum class Outcome { accept, reject, undecided };

struct Simulator {
    const Ctmc& c;
    const Dta& a;
    const SimConfig& cfg;
    const Dmta& m;
    const RegionGraph& g;
    std::vector<int> loc_of;                 // s * |Q| + q -> product location
    std::map<std::pair<int, Region>, int> vertex_of;
    std::vector<bool> accept_v, reject_v;
    std::vector<std::vector<int>> edges_of;  // s * |Q| + q -> matching automaton edges
    std::vector<std::vector<double>> cumulative;

    Simulator(const Ctmc& c_, const SimConfig& cfg_, const Prepared& p)
        : c(c_), a(p.automaton), cfg(cfg_), m(p.product), g(p.graph) {
        const int nq = a.num_locations();
        loc_of.assign(static_cast<std::size_t>(c.size()) * nq, -1);
        for (int l = 0; l < m.size(); ++l) loc_of[m.pairs[l].first * nq + m.pairs[l].second] = l;
        edges_of.resize(static_cast<std::size_t>(c.size()) * nq);
        for (int s = 0; s < c.size(); ++s)
            for (std::size_t e = 0; e < a.edges.size(); ++e)
                if (a.edges[e].symbol == c.labels[s]) edges_of[s * nq + a.edges[e].from].push_back(static_cast<int>(e));
        for (int v = 0; v < g.size(); ++v) vertex_of[{g.vertices[v].location, g.vertices[v].region}] = v;

        const bool muller = a.acceptance == AcceptanceKind::muller;
        accept_v.assign(g.size(), false);
        reject_v.assign(g.size(), false);
        Digraph d = g.digraph();
        if (muller) {
            accept_v = p.target;
            for (const auto& b : bottom_sccs(d))
                for (int v : b)
                    if (!p.target[v]) reject_v[v] = true;
        }
        if (cfg.prune) {
            std::vector<bool> can = backward_reachable(d, p.target);
            for (int v = 0; v < g.size(); ++v)
                if (!can[v]) reject_v[v] = true;
        }
        for (int s = 0; s < c.size(); ++s) {
            std::vector<double> row(c.size());
            double acc = 0.0;
            for (int t = 0; t < c.size(); ++t) row[t] = acc += c.jump(s, t);
            cumulative.push_back(std::move(row));
        }
    }

    int successor(int s, Rng& rng) const {
        double u = std::uniform_real_distribution<double>(0.0, cumulative[s].back())(rng);
        const auto& row = cumulative[s];
        int t = static_cast<int>(std::upper_bound(row.begin(), row.end(), u) - row.begin());
        t = std::min(t, c.size() - 1);
        while (t > 0 && c.jump(s, t) == 0.0) --t;
        return t;
    }

    Outcome run(Rng& rng) const {
        const int nq = a.num_locations();
        const bool muller = a.acceptance == AcceptanceKind::muller;
        int s = c.initial, q = a.initial;
        ClockValuation eta(a.num_clocks(), 0.0);
        std::vector<Interval> enabled;
        for (long step = 0;; ++step) {
            if (!muller && a.is_accepting(q)) return Outcome::accept;
            if (muller || cfg.prune) {
                int l = loc_of[s * nq + q];
                auto it = vertex_of.find({l, region_of(eta, g.scheme)});
                if (it != vertex_of.end()) {
                    if (accept_v[it->second]) return Outcome::accept;
                    if (reject_v[it->second]) return Outcome::reject;
                }
            }
            if (step >= cfg.max_steps) return Outcome::undecided;
            const double rate = c.rates[s];
            if (rate <= 0.0) return Outcome::reject;  // time-locked, the run stops
            double tau;
            if (cfg.semantics == SimSemantics::literal) {
                tau = std::exponential_distribution<double>(rate)(rng);
            } else {
                enabled.clear();
                for (int e : edges_of[s * nq + q]) {
                    Interval iv = guard_enabled_interval(a.edges[e].guard, eta);
                    if (!iv.empty() && iv.length() > 0.0) enabled.push_back(iv);
                }
                std::sort(enabled.begin(), enabled.end(),
                          [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
                double exposure = std::exponential_distribution<double>(rate)(rng);
                tau = -1.0;
                for (const auto& iv : enabled) {
                    if (exposure < iv.hi - iv.lo) {
                        tau = iv.lo + exposure;
                        break;
                    }
                    exposure -= iv.hi - iv.lo;
                }
                if (tau <= 0.0) return Outcome::reject;  // never enabled again
            }
            int next = successor(s, rng);
            auto st = dta_step(a, q, eta, c.labels[s], tau);
            if (!st) return Outcome::reject;
            s = next;
            q = st->location;
            eta = std::move(st->eta);
        }
    }
};

}  // namespace

Estimate simulate_acceptance(const Ctmc& c, const Dta& a, const SimConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (cfg.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    Prepared p = prepare(c, a, cfg.muller);
    Simulator sim(c, cfg, p);

    // Fixed-size blocks with their own streams keep the result independent
    // of the thread count.
    constexpr long block = 1 << 14;
    const long blocks = (cfg.samples + block - 1) / block;
    std::vector<std::array<long, 3>> counts(blocks, {0, 0, 0});
    std::atomic<long> next_block{0};
    auto worker = [&] {
        for (long b; (b = next_block.fetch_add(1)) < blocks;) {
            Rng rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(b));
            long n = std::min(block, cfg.samples - b * block);
            for (long i = 0; i < n; ++i) ++counts[b][static_cast<int>(sim.run(rng))];
        }
    };
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::clamp<long>(threads, 1, blocks));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    long acc = 0, rej = 0, und = 0;
    for (const auto& k : counts) {
        acc += k[0];
        rej += k[1];
        und += k[2];
    }
    Estimate e = binomial_estimate(acc, acc + rej, cfg.confidence);
    e.accepted = acc;
    e.rejected = rej;
    e.undecided = und;
    e.bracket_low = static_cast<double>(acc) / static_cast<double>(cfg.samples);
    e.bracket_high = static_cast<double>(acc + und) / static_cast<double>(cfg.samples);
    return e;
}

VerificationReport simulate_report(const Ctmc& c, const Dta& a, const SimConfig& cfg) {
    VerificationReport r;
    r.method = "simulate";
    r.acceptance = a.acceptance == AcceptanceKind::finite ? "finite" : "muller";
    PhaseTimer timer(r);
    validated(a, &r.warnings);
    Estimate e = simulate_acceptance(c, a, cfg);
    timer.lap("simulate");
    r.probability = e.p;
    r.error_bound = e.half_width;
    SimulationSummary s;
    s.samples = cfg.samples;
    s.accepted = e.accepted;
    s.rejected = e.rejected;
    s.undecided = e.undecided;
    s.half_width = e.half_width;
    s.ci_low = e.ci_low;
    s.ci_high = e.ci_high;
    s.bracket_low = e.bracket_low;
    s.bracket_high = e.bracket_high;
    s.confidence = cfg.confidence;
    s.interval = e.interval;
    s.seed = cfg.seed;
    r.simulation = s;
    if (e.undecided > 0)
        r.warnings.push_back(std::to_string(e.undecided) + " runs hit max_steps undecided");
    return r;
}

}  // namespace ctdta
