#include "ctdta/markov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctdta/errors.hpp"

namespace ctdta {

int Ctmc::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

void validate_ctmc(const Ctmc& c) {
    const int n = c.size();
    if (n == 0) throw ValidationError("ctmc has no states");
    if (c.jump.rows() != n || c.jump.cols() != n || c.rates.size() != n ||
        static_cast<int>(c.labels.size()) != n) {
        throw ValidationError("ctmc dimensions do not match the state count");
    }
    if (c.initial < 0 || c.initial >= n) throw ValidationError("ctmc initial state out of range");
    for (int s = 0; s < n; ++s) {
        if (!(c.rates[s] >= 0.0) || !std::isfinite(c.rates[s])) {
            throw ValidationError("state '" + c.names[s] + "': exit rate must be finite and >= 0");
        }
        double sum = 0.0;
        for (int t = 0; t < n; ++t) {
            double p = c.jump(s, t);
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ValidationError("state '" + c.names[s] + "': probability outside [0,1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "state '" << c.names[s] << "': outgoing probabilities sum to " << sum;
            throw ValidationError(os.str());
        }
    }
}

Dtmc embedded_dtmc(const Ctmc& c) {
    return Dtmc{c.names, c.jump, c.initial};
}

GeneratorMatrix generator(const Ctmc& c) {
    Eigen::MatrixXd q = c.rates.asDiagonal() * c.jump;
    q.diagonal() -= c.rates;
    return GeneratorMatrix{q};
}

// ============================================================================
// Transient analysis
// ============================================================================

Eigen::MatrixXd transient_matrix(const Eigen::VectorXd& rates, const Eigen::MatrixXd& jump,
                                 double t, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("transient_matrix: eps must lie in (0,1)");
    if (!(t >= 0.0)) throw std::invalid_argument("transient_matrix: t must be >= 0");
    const Eigen::Index n = jump.rows();
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    if (t == 0.0 || n == 0) return id;

    double q = rates.size() ? rates.maxCoeff() : 0.0;
    if (q <= 0.0) q = 1e-12;
    Eigen::VectorXd ratio = rates / q;
    Eigen::MatrixXd pu = ratio.asDiagonal() * jump;
    pu.diagonal() += Eigen::VectorXd::Ones(n) - ratio;

    const double qt = q * t;
    const double log_qt = std::log(qt);
    const long k_cap = static_cast<long>(qt + 20.0 * std::sqrt(qt) + 200.0);

    Eigen::MatrixXd term = id;
    double w = std::exp(-qt);
    Eigen::MatrixXd result = w * id;
    double mass = w;
    for (long k = 1; mass < 1.0 - eps; ++k) {
        if (k > k_cap) break;  // weights beyond this are below double resolution
        term = term * pu;
        w = std::exp(-qt + k * log_qt - std::lgamma(static_cast<double>(k) + 1.0));
        result += w * term;
        mass += w;
    }
    return result;
}

Eigen::MatrixXd transient_matrix(const Ctmc& c, double t, double eps) {
    return transient_matrix(c.rates, c.jump, t, eps);
}

// ============================================================================
// Reachability
// ============================================================================

std::vector<double> reachability(const Eigen::MatrixXd& p, const std::vector<bool>& target) {
    const int n = static_cast<int>(p.rows());
    Digraph g(n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (p(s, t) > 0.0) g[s].push_back(t);
    std::vector<bool> can = backward_reachable(g, target);

    std::vector<int> idx(n, -1);
    std::vector<int> unknowns;
    for (int s = 0; s < n; ++s) {
        if (can[s] && !target[s]) {
            idx[s] = static_cast<int>(unknowns.size());
            unknowns.push_back(s);
        }
    }
    std::vector<double> x(n, 0.0);
    for (int s = 0; s < n; ++s)
        if (target[s]) x[s] = 1.0;
    const int k = static_cast<int>(unknowns.size());
    if (k == 0) return x;

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i) {
        int s = unknowns[i];
        for (int t = 0; t < n; ++t) {
            double pst = p(s, t);
            if (pst == 0.0) continue;
            if (target[t]) b[i] += pst;
            else if (idx[t] >= 0) a(i, idx[t]) -= pst;
        }
    }
    Eigen::VectorXd sol = a.partialPivLu().solve(b);
    for (int i = 0; i < k; ++i) x[unknowns[i]] = std::clamp(sol[i], 0.0, 1.0);
    return x;
}

std::vector<double> dtmc_reachability(const Dtmc& d, const std::vector<int>& targets) {
    std::vector<bool> t(d.size(), false);
    for (int s : targets) {
        if (s < 0 || s >= d.size()) throw std::out_of_range("dtmc_reachability: target out of range");
        t[s] = true;
    }
    return reachability(d.matrix, t);
}

// ============================================================================
// Graph structure
// ============================================================================

std::vector<std::vector<int>> strongly_connected_components(const Digraph& g) {
    // Iterative Tarjan.
    const int n = static_cast<int>(g.size());
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> out;
    int counter = 0;

    std::vector<std::pair<int, std::size_t>> call;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next < g[v].size()) {
                int w = g[v][next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    }
    return out;
}

std::vector<std::vector<int>> bottom_sccs(const Digraph& g) {
    auto sccs = strongly_connected_components(g);
    std::vector<int> comp_of(g.size(), -1);
    for (std::size_t c = 0; c < sccs.size(); ++c)
        for (int v : sccs[c]) comp_of[v] = static_cast<int>(c);
    std::vector<std::vector<int>> out;
    for (std::size_t c = 0; c < sccs.size(); ++c) {
        bool leaves = false;
        for (int v : sccs[c]) {
            for (int w : g[v]) {
                if (comp_of[w] != static_cast<int>(c)) {
                    leaves = true;
                    break;
                }
            }
            if (leaves) break;
        }
        if (!leaves) out.push_back(sccs[c]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<bool> backward_reachable(const Digraph& g, const std::vector<bool>& target) {
    const int n = static_cast<int>(g.size());
    Digraph rev(n);
    for (int v = 0; v < n; ++v)
        for (int w : g[v]) rev[w].push_back(v);
    std::vector<bool> seen(n, false);
    std::vector<int> todo;
    for (int v = 0; v < n; ++v) {
        if (target[v]) {
            seen[v] = true;
            todo.push_back(v);
        }
    }
    while (!todo.empty()) {
        int v = todo.back();
        todo.pop_back();
        for (int u : rev[v]) {
            if (!seen[u]) {
                seen[u] = true;
                todo.push_back(u);
            }
        }
    }
    return seen;
}

std::vector<bool> forward_reachable(const Digraph& g, int from) {
    std::vector<bool> seen(g.size(), false);
    if (from < 0) return seen;
    std::vector<int> todo{from};
    seen[from] = true;
    while (!todo.empty()) {
        int v = todo.back();
        todo.pop_back();
        for (int w : g[v]) {
            if (!seen[w]) {
                seen[w] = true;
                todo.push_back(w);
            }
        }
    }
    return seen;
}

// ============================================================================
// Sampling
// ============================================================================

TimedPath sample_timed_path(const Ctmc& c, Rng& rng, int max_steps) {
    if (max_steps < 1) throw std::invalid_argument("sample_timed_path: max_steps must be >= 1");
    TimedPath path;
    int s = c.initial;
    path.states.push_back(s);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int step = 0; step < max_steps; ++step) {
        double e = c.rates[s];
        if (e <= 0.0) break;
        double tau = std::exponential_distribution<double>(e)(rng);
        double u = unif(rng);
        int next = -1;
        double acc = 0.0;
        for (int t = 0; t < c.size(); ++t) {
            acc += c.jump(s, t);
            if (c.jump(s, t) > 0.0) next = t;
            if (u < acc) break;
        }
        if (next < 0) break;
        path.sojourns.push_back(tau);
        path.states.push_back(next);
        s = next;
    }
    return path;
}

Rng derive_stream(std::uint64_t seed, std::uint64_t worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(worker), static_cast<std::uint32_t>(worker >> 32)};
    return Rng(seq);
}

}  // namespace ctdta
