#include "ctdta/region.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "ctdta/errors.hpp"

namespace ctdta {

// ============================================================================
// Regions
// ============================================================================

RegionScheme make_scheme(const Dmta& m, ConstantMode mode) {
    RegionScheme s;
    const int nx = m.num_clocks();
    if (nx == 1) {
        std::set<long> bp{0};
        for (const auto& es : m.edges)
            for (const auto& e : es)
                for (const auto& at : e.guard.atoms) bp.insert(at.constant);
        if (!m.constants.empty()) bp.insert(m.constants[0].begin(), m.constants[0].end());
        s.breakpoints.emplace_back(bp.begin(), bp.end());
        return s;
    }
    std::vector<long> c = max_constants(m);
    long global = c.empty() ? 0 : *std::max_element(c.begin(), c.end());
    for (int x = 0; x < nx; ++x) {
        long top = mode == ConstantMode::global_max ? global : c[x];
        std::vector<long> bp;
        for (long k = 0; k <= top; ++k) bp.push_back(k);
        s.breakpoints.push_back(std::move(bp));
    }
    return s;
}

Region zero_region(const RegionScheme& s) {
    Region r;
    r.idx.assign(s.num_clocks(), 0);
    if (s.num_clocks() > 0) {
        std::vector<int> all;
        for (int x = 0; x < s.num_clocks(); ++x) all.push_back(x);
        r.classes.push_back(std::move(all));
        r.zero_class = true;
    }
    return r;
}

static bool on_boundary(const Region& r, int x) {
    if (!r.zero_class) return false;
    const auto& z = r.classes.front();
    return std::find(z.begin(), z.end(), x) != z.end();
}

bool is_beyond(const Region& r, const RegionScheme& s, int x) {
    return r.idx[x] == s.top(x) && !on_boundary(r, x);
}

std::optional<Region> delay_successor(const Region& r, const RegionScheme& s) {
    Region n = r;
    if (r.zero_class) {
        std::vector<int> first;
        for (int x : r.classes.front())
            if (r.idx[x] < s.top(x)) first.push_back(x);
        n.classes.erase(n.classes.begin());
        if (!first.empty()) n.classes.insert(n.classes.begin(), std::move(first));
        n.zero_class = false;
        return n;
    }
    if (r.classes.empty()) return std::nullopt;
    std::vector<int> last = n.classes.back();
    n.classes.pop_back();
    for (int x : last) ++n.idx[x];
    n.classes.insert(n.classes.begin(), std::move(last));
    n.zero_class = true;
    return n;
}

Region reset_region(const Region& r, const std::vector<int>& clocks) {
    if (clocks.empty()) return r;
    Region n = r;
    std::vector<int> reset = clocks;
    std::sort(reset.begin(), reset.end());
    reset.erase(std::unique(reset.begin(), reset.end()), reset.end());
    for (auto& cls : n.classes) {
        cls.erase(std::remove_if(cls.begin(), cls.end(),
                                 [&](int x) { return std::binary_search(reset.begin(), reset.end(), x); }),
                  cls.end());
    }
    bool first_was_zero = n.zero_class;
    if (first_was_zero && n.classes.front().empty()) {
        n.classes.front() = reset;
    } else if (first_was_zero) {
        auto& z = n.classes.front();
        z.insert(z.end(), reset.begin(), reset.end());
        std::sort(z.begin(), z.end());
    } else {
        n.classes.insert(n.classes.begin(), reset);
    }
    n.zero_class = true;
    n.classes.erase(std::remove_if(n.classes.begin() + 1, n.classes.end(),
                                   [](const std::vector<int>& c) { return c.empty(); }),
                    n.classes.end());
    for (int x : reset) n.idx[x] = 0;
    return n;
}

static int breakpoint_index(const RegionScheme& s, int x, long c) {
    const auto& bp = s.breakpoints[x];
    auto it = std::lower_bound(bp.begin(), bp.end(), c);
    if (it == bp.end() || *it != c)
        throw InternalError("guard constant " + std::to_string(c) + " is not a region breakpoint");
    return static_cast<int>(it - bp.begin());
}

bool satisfies(const Region& r, const RegionScheme& s, const ClockConstraint& g) {
    for (const auto& a : g.atoms) {
        const int x = a.clock;
        const int k = breakpoint_index(s, x, a.constant);
        const int j = r.idx[x];
        bool ok;
        if (on_boundary(r, x)) {
            long v = s.breakpoints[x][j];
            switch (a.op) {
            case Cmp::lt: ok = v < a.constant; break;
            case Cmp::le: ok = v <= a.constant; break;
            case Cmp::gt: ok = v > a.constant; break;
            default: ok = v >= a.constant; break;
            }
        } else if (j == s.top(x)) {
            ok = a.op == Cmp::gt || a.op == Cmp::ge;
        } else if (a.op == Cmp::lt || a.op == Cmp::le) {
            ok = j + 1 <= k;
        } else {
            ok = j >= k;
        }
        if (!ok) return false;
    }
    return true;
}

namespace {

// Groups clocks by a fractional key and builds the ordered classes.
template <class Key>
std::vector<std::vector<int>> order_classes(std::vector<std::pair<Key, int>> items) {
    std::sort(items.begin(), items.end());
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i == 0 || items[i].first != items[i - 1].first) out.emplace_back();
        out.back().push_back(items[i].second);
    }
    return out;
}

int floor_index(const std::vector<long>& bp, double v) {
    auto it = std::upper_bound(bp.begin(), bp.end(), v,
                               [](double val, long b) { return val < static_cast<double>(b); });
    return std::max(0, static_cast<int>(it - bp.begin()) - 1);
}

}  // namespace

Region classic_region_of(const ClockValuation& eta, const RegionScheme& s) {
    Region r;
    r.idx.assign(s.num_clocks(), 0);
    std::vector<int> zero;
    std::vector<std::pair<double, int>> inner;
    for (int x = 0; x < s.num_clocks(); ++x) {
        const auto& bp = s.breakpoints[x];
        int k = floor_index(bp, eta[x]);
        r.idx[x] = k;
        double off = eta[x] - static_cast<double>(bp[k]);
        if (off == 0.0) zero.push_back(x);
        else if (k < s.top(x)) inner.push_back({off, x});
    }
    r.classes = order_classes(std::move(inner));
    if (!zero.empty()) {
        r.classes.insert(r.classes.begin(), zero);
        r.zero_class = true;
    }
    return r;
}

Region region_of(const ClockValuation& eta, const RegionScheme& s) {
    Region r;
    r.idx.assign(s.num_clocks(), 0);
    std::vector<std::pair<double, int>> inner;
    for (int x = 0; x < s.num_clocks(); ++x) {
        const auto& bp = s.breakpoints[x];
        int k = floor_index(bp, eta[x]);
        r.idx[x] = k;
        if (k < s.top(x)) inner.push_back({eta[x] - static_cast<double>(bp[k]), x});
    }
    r.classes = order_classes(std::move(inner));
    return r;
}

Region region_of_scaled(const std::vector<long>& num, long den, const RegionScheme& s) {
    Region r;
    r.idx.assign(s.num_clocks(), 0);
    std::vector<std::pair<long, int>> inner;
    for (int x = 0; x < s.num_clocks(); ++x) {
        const auto& bp = s.breakpoints[x];
        int k = 0;
        while (k + 1 <= s.top(x) && bp[k + 1] * den <= num[x]) ++k;
        r.idx[x] = k;
        if (k < s.top(x)) inner.push_back({num[x] - bp[k] * den, x});
    }
    r.classes = order_classes(std::move(inner));
    return r;
}

std::string describe_region(const Region& r, const RegionScheme& s,
                            const std::vector<std::string>& clocks) {
    if (s.num_clocks() == 0) return "true";
    std::ostringstream os;
    const bool merged = !r.zero_class;
    int bounded = 0;
    for (int x = 0; x < s.num_clocks(); ++x) {
        if (x) os << ", ";
        const auto& bp = s.breakpoints[x];
        const int j = r.idx[x];
        if (on_boundary(r, x)) {
            os << clocks[x] << "=" << bp[j];
            ++bounded;
        } else if (j == s.top(x)) {
            os << clocks[x] << (merged ? ">=" : ">") << bp[j];
        } else {
            os << bp[j] << (merged ? "<=" : "<") << clocks[x] << "<" << bp[j + 1];
            ++bounded;
        }
    }
    if (bounded >= 2) {
        os << "; frac ";
        for (std::size_t c = 0; c < r.classes.size(); ++c) {
            if (c) os << "<";
            if (c == 0 && r.zero_class) os << "0=";
            for (std::size_t i = 0; i < r.classes[c].size(); ++i)
                os << (i ? "=" : "") << clocks[r.classes[c][i]];
        }
    }
    return os.str();
}

// ============================================================================
// Region graph
// ============================================================================

Digraph RegionGraph::digraph() const {
    Digraph d(vertices.size());
    for (int v = 0; v < size(); ++v) {
        auto& out = d[v];
        if (vertices[v].delay >= 0) out.push_back(vertices[v].delay);
        for (const auto& e : vertices[v].markov) out.push_back(e.target);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return d;
}

int RegionGraph::find(int location, const Region& r) const {
    for (int v = 0; v < size(); ++v)
        if (vertices[v].location == location && vertices[v].region == r) return v;
    return -1;
}

namespace {

struct VertexIndex {
    std::map<std::pair<int, Region>, int> ids;
    RegionGraph* g;
    std::deque<int>* todo;

    int intern(int loc, const Region& r) {
        auto [it, fresh] = ids.try_emplace({loc, r}, g->size());
        if (fresh) {
            RegionVertex v;
            v.location = loc;
            v.region = r;
            g->vertices.push_back(std::move(v));
            todo->push_back(it->second);
        }
        return it->second;
    }
};

RegionGraph empty_like(const Dmta& m, const RegionScheme& s) {
    RegionGraph g;
    g.scheme = s;
    g.clocks = m.clocks;
    g.location_names = m.names;
    return g;
}

}  // namespace

RegionGraph build_region_graph(const Dmta& m, const RegionScheme& s) {
    if (s.num_clocks() != m.num_clocks()) throw InternalError("region scheme does not match clocks");
    RegionGraph g = empty_like(m, s);
    std::deque<int> todo;
    VertexIndex index{{}, &g, &todo};
    g.initial = index.intern(m.initial, zero_region(s));
    while (!todo.empty()) {
        int v = todo.front();
        todo.pop_front();
        const int loc = g.vertices[v].location;
        const Region r = g.vertices[v].region;
        if (auto succ = delay_successor(r, s)) {
            int w = index.intern(loc, *succ);
            g.vertices[v].delay = w;
        }
        if (m.rates[loc] <= 0.0) continue;  // time-locked: no jump ever fires
        for (std::size_t k = 0; k < m.edges[loc].size(); ++k) {
            const auto& e = m.edges[loc][k];
            if (!satisfies(r, s, e.guard)) continue;
            Region target = reset_region(r, e.resets);
            for (auto [l2, p] : e.dist) {
                int w = index.intern(l2, target);
                g.vertices[v].markov.push_back({w, p, e.resets, static_cast<int>(k)});
            }
        }
        if (!g.vertices[v].markov.empty()) g.vertices[v].rate = m.rates[loc];
    }
    for (auto& v : g.vertices) v.accepting = m.acceptance == AcceptanceKind::finite && m.accepting[v.location];
    return g;
}

RegionGraph build_region_graph(const Dmta& m, ConstantMode mode) {
    return build_region_graph(m, make_scheme(m, mode));
}

RegionGraph simplify_region_graph(const RegionGraph& g) {
    if (g.simplified) return g;
    auto rep = [&](int v) {
        for (int guard = 0; g.vertices[v].region.zero_class; ++guard) {
            if (g.vertices[v].delay < 0 || guard > g.size())
                throw InternalError("boundary vertex without delay successor");
            v = g.vertices[v].delay;
        }
        return v;
    };
    RegionGraph out;
    out.scheme = g.scheme;
    out.clocks = g.clocks;
    out.location_names = g.location_names;
    out.simplified = true;
    if (g.initial < 0) return out;

    std::vector<int> map(g.size(), -1);
    std::deque<int> todo;
    auto intern = [&](int old) {
        if (map[old] < 0) {
            map[old] = out.size();
            RegionVertex v = g.vertices[old];
            v.delay = -1;
            v.markov.clear();
            out.vertices.push_back(std::move(v));
            todo.push_back(old);
        }
        return map[old];
    };
    out.initial = intern(rep(g.initial));
    while (!todo.empty()) {
        int old = todo.front();
        todo.pop_front();
        const auto& src = g.vertices[old];
        int nv = map[old];
        if (src.delay >= 0) {
            int t = intern(rep(src.delay));
            out.vertices[nv].delay = t;
        }
        for (const auto& e : src.markov) {
            int t = intern(rep(e.target));
            out.vertices[nv].markov.push_back({t, e.prob, e.resets, e.dmta_edge});
        }
    }
    return out;
}

Pruned prune(const RegionGraph& g, const std::vector<bool>& target) {
    Pruned p;
    p.graph.scheme = g.scheme;
    p.graph.clocks = g.clocks;
    p.graph.location_names = g.location_names;
    p.graph.simplified = g.simplified;
    p.old_to_new.assign(g.size(), -1);
    if (g.initial < 0) return p;

    Digraph d = g.digraph();
    Digraph stop = d;
    for (int v = 0; v < g.size(); ++v)
        if (target[v]) stop[v].clear();
    std::vector<bool> fwd = forward_reachable(stop, g.initial);
    std::vector<bool> bwd = backward_reachable(d, target);
    for (int v = 0; v < g.size(); ++v) {
        if (fwd[v] && bwd[v]) {
            p.old_to_new[v] = static_cast<int>(p.new_to_old.size());
            p.new_to_old.push_back(v);
        }
    }
    for (int old : p.new_to_old) {
        RegionVertex v = g.vertices[old];
        v.delay = v.delay >= 0 ? p.old_to_new[v.delay] : -1;
        std::vector<MarkovEdge> kept;
        for (auto e : v.markov) {
            e.target = p.old_to_new[e.target];
            if (e.target >= 0) kept.push_back(e);
        }
        v.markov = std::move(kept);
        p.graph.vertices.push_back(std::move(v));
    }
    p.graph.initial = p.old_to_new[g.initial];
    return p;
}

GraphStats stats(const RegionGraph& g) {
    GraphStats s;
    s.vertices = g.size();
    for (const auto& v : g.vertices) {
        if (v.delay >= 0) ++s.delay_edges;
        s.markov_edges += static_cast<int>(v.markov.size());
    }
    return s;
}

std::string to_dot(const RegionGraph& g) {
    std::ostringstream os;
    os << "digraph region_graph {\n  node [shape=record];\n";
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        os << "  v" << v << " [label=\"{" << g.location_names[x.location] << " | "
           << describe_region(x.region, g.scheme, g.clocks) << " | " << x.rate << "}\"";
        if (x.accepting) os << ", style=filled, fillcolor=lightgray";
        if (v == g.initial) os << ", penwidth=2";
        os << "];\n";
    }
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        if (x.delay >= 0) os << "  v" << v << " -> v" << x.delay << " [label=\"delta\", style=dashed];\n";
        for (const auto& e : x.markov) {
            os << "  v" << v << " -> v" << e.target << " [label=\"" << e.prob;
            if (!e.resets.empty()) {
                os << ", {";
                for (std::size_t i = 0; i < e.resets.size(); ++i)
                    os << (i ? "," : "") << g.clocks[e.resets[i]];
                os << "}";
            }
            os << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

// ============================================================================
// PDP view
// ============================================================================

bool in_invariant(const RegionGraph& g, const PdpState& st) {
    return region_of(st.eta, g.scheme) == g.vertices[st.vertex].region;
}

double boundary_hit_time(const RegionGraph& g, const PdpState& st) {
    const Region& r = g.vertices[st.vertex].region;
    double best = std::numeric_limits<double>::infinity();
    for (int x = 0; x < g.scheme.num_clocks(); ++x) {
        if (r.idx[x] >= g.scheme.top(x)) continue;
        double bound = static_cast<double>(g.scheme.breakpoints[x][r.idx[x] + 1]);
        best = std::min(best, bound - st.eta[x]);
    }
    return best;
}

double embedded_jump_probability(double rate, double flat, const std::vector<JumpPiece>& pieces,
                                 double boundary_mass) {
    double total = 0.0;
    double from = 0.0;
    for (const auto& piece : pieces) {
        double to = std::min(piece.until, flat);
        if (to > from && rate > 0.0) {
            double tail = std::isinf(to) ? 0.0 : std::exp(-rate * to);
            total += piece.mass * (std::exp(-rate * from) - tail);
        }
        from = std::max(from, to);
        if (from >= flat) break;
    }
    if (std::isfinite(flat)) total += boundary_mass * std::exp(-rate * flat);
    return total;
}

double embedded_jump_probability(const RegionGraph& g, const PdpState& st,
                                 const std::vector<bool>& in_target) {
    const auto& v = g.vertices[st.vertex];
    double mass = 0.0;
    for (const auto& e : v.markov)
        if (in_target[e.target]) mass += e.prob;
    double boundary = v.delay >= 0 && in_target[v.delay] ? 1.0 : 0.0;
    // Within one region the enabled edge, and hence q, does not change.
    JumpPiece piece{std::numeric_limits<double>::infinity(), mass};
    return embedded_jump_probability(v.rate, boundary_hit_time(g, st), {piece}, boundary);
}

std::vector<PdpVertexView> pdp_view(const RegionGraph& g) {
    std::vector<PdpVertexView> out(g.size());
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.vertices[v];
        double self = 0.0;
        for (const auto& e : x.markov)
            if (e.target == v && e.resets.empty()) self += e.prob;
        auto& view = out[v];
        view.boundary_target = x.delay;
        if (self >= 1.0 - 1e-15) continue;  // the jump never changes the state
        view.rate = x.rate * (1.0 - self);
        for (const auto& e : x.markov) {
            if (e.target == v && e.resets.empty()) continue;
            view.jumps.push_back({e.target, e.prob / (1.0 - self), e.resets});
        }
    }
    return out;
}

}  // namespace ctdta
