#include "ctdta/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctdta/errors.hpp"

namespace ctdta {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": invalid JSON (" + e.what() + ")");
    }
}

// Field access with JSON-path style provenance in error messages.
struct Node {
    const json& j;
    std::string path;
    const std::string& source;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(source + ": " + (path.empty() ? "document" : path) + ": " + msg);
    }
    bool has(const char* key) const { return j.is_object() && j.contains(key); }
    Node at(const char* key) const {
        if (!j.is_object()) fail("expected an object");
        if (!j.contains(key)) fail(std::string("missing field \"") + key + "\"");
        return {j.at(key), path.empty() ? key : path + "." + key, source};
    }
    Node at(std::size_t i) const { return {j.at(i), path + "[" + std::to_string(i) + "]", source}; }
    std::size_t size() const {
        if (!j.is_array()) fail("expected an array");
        return j.size();
    }
    std::string str() const {
        if (j.is_string()) return j.get<std::string>();
        if (j.is_number_integer()) return std::to_string(j.get<long long>());
        fail("expected a string");
    }
    double num() const {
        if (!j.is_number()) fail("expected a number");
        return j.get<double>();
    }
    long integer() const {
        if (!j.is_number_integer()) fail("expected an integer");
        return j.get<long>();
    }
    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).str());
        return out;
    }
};

template <class Lookup>
int resolve(const Node& n, Lookup&& lookup, const char* what) {
    std::string name = n.str();
    int idx = lookup(name);
    if (idx < 0) n.fail(std::string("unknown ") + what + " \"" + name + "\"");
    return idx;
}

}  // namespace

// ============================================================================
// CTMC
// ============================================================================

Ctmc parse_ctmc(const std::string& text, const std::string& source) {
    json doc = parse_json(text, source);
    Node root{doc, "", source};
    Ctmc c;
    Node states = root.at("states");
    const std::size_t n = states.size();
    c.jump = Eigen::MatrixXd::Zero(n, n);
    c.rates = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        Node s = states.at(i);
        std::string id = s.at("id").str();
        if (c.index_of(id) >= 0) s.at("id").fail("duplicate state id \"" + id + "\"");
        c.names.push_back(id);
        Label l;
        if (s.has("labels"))
            for (auto& ap : s.at("labels").strings()) l.insert(ap);
        c.labels.push_back(std::move(l));
        c.rates[i] = s.at("rate").num();
    }
    c.initial = resolve(root.at("initial"), [&](const std::string& k) { return c.index_of(k); }, "state");
    if (root.has("transitions")) {
        Node ts = root.at("transitions");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            Node t = ts.at(i);
            int from = resolve(t.at("from"), [&](const std::string& k) { return c.index_of(k); }, "state");
            int to = resolve(t.at("to"), [&](const std::string& k) { return c.index_of(k); }, "state");
            c.jump(from, to) += t.at("prob").num();
        }
    }
    try {
        validate_ctmc(c);
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return c;
}

Ctmc load_ctmc(const std::string& path) {
    return parse_ctmc(read_file(path), path);
}

std::string save_ctmc(const Ctmc& c) {
    json doc;
    doc["states"] = json::array();
    for (int s = 0; s < c.size(); ++s) {
        doc["states"].push_back({{"id", c.names[s]},
                                 {"labels", std::vector<std::string>(c.labels[s].begin(), c.labels[s].end())},
                                 {"rate", c.rates[s]}});
    }
    doc["initial"] = c.names[c.initial];
    doc["transitions"] = json::array();
    for (int s = 0; s < c.size(); ++s)
        for (int t = 0; t < c.size(); ++t)
            if (c.jump(s, t) != 0.0)
                doc["transitions"].push_back({{"from", c.names[s]}, {"to", c.names[t]}, {"prob", c.jump(s, t)}});
    return doc.dump(2) + "\n";
}

// ============================================================================
// DTA
// ============================================================================

Dta parse_dta(const std::string& text, const std::string& source) {
    json doc = parse_json(text, source);
    Node root{doc, "", source};
    Dta a;
    if (root.has("clocks")) a.clocks = root.at("clocks").strings();
    a.locations = root.at("locations").strings();
    auto loc = [&](const std::string& k) { return a.location_index(k); };
    auto clk = [&](const std::string& k) { return a.clock_index(k); };
    a.initial = resolve(root.at("initial"), loc, "location");

    Node acc = root.at("acceptance");
    std::string kind = acc.at("kind").str();
    if (kind == "finite") {
        a.acceptance = AcceptanceKind::finite;
        Node ls = acc.at("locations");
        for (std::size_t i = 0; i < ls.size(); ++i) a.accepting.push_back(resolve(ls.at(i), loc, "location"));
    } else if (kind == "muller") {
        a.acceptance = AcceptanceKind::muller;
        Node fam = acc.at("family");
        for (std::size_t i = 0; i < fam.size(); ++i) {
            Node f = fam.at(i);
            std::vector<int> set;
            for (std::size_t k = 0; k < f.size(); ++k) set.push_back(resolve(f.at(k), loc, "location"));
            a.family.push_back(std::move(set));
        }
    } else {
        acc.at("kind").fail("expected \"finite\" or \"muller\"");
    }

    if (root.has("edges")) {
        Node es = root.at("edges");
        for (std::size_t i = 0; i < es.size(); ++i) {
            Node e = es.at(i);
            DtaEdge edge;
            edge.from = resolve(e.at("from"), loc, "location");
            edge.to = resolve(e.at("to"), loc, "location");
            for (auto& ap : e.at("symbol").strings()) edge.symbol.insert(ap);
            if (e.has("guard")) {
                Node g = e.at("guard");
                for (std::size_t k = 0; k < g.size(); ++k) {
                    Node atom = g.at(k);
                    ClockAtom at;
                    at.clock = resolve(atom.at("clock"), clk, "clock");
                    try {
                        at.op = parse_cmp(atom.at("op").str());
                    } catch (const std::invalid_argument& ex) {
                        atom.at("op").fail(ex.what());
                    }
                    at.constant = atom.at("const").integer();
                    if (at.constant < 0) atom.at("const").fail("constants must be natural numbers");
                    edge.guard.atoms.push_back(at);
                }
            }
            if (e.has("resets"))
                for (auto& x : e.at("resets").strings()) edge.resets.push_back(clk(x) >= 0 ? clk(x) : resolve(e.at("resets"), clk, "clock"));
            a.edges.push_back(std::move(edge));
        }
    }
    return a;
}

Dta load_dta(const std::string& path, std::vector<std::string>* warnings) {
    Dta raw = parse_dta(read_file(path), path);
    try {
        return validated(raw, warnings);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::string save_dta(const Dta& a) {
    json doc;
    doc["clocks"] = a.clocks;
    doc["locations"] = a.locations;
    doc["initial"] = a.locations[a.initial];
    if (a.acceptance == AcceptanceKind::finite) {
        std::vector<std::string> ls;
        for (int q : a.accepting) ls.push_back(a.locations[q]);
        doc["acceptance"] = {{"kind", "finite"}, {"locations", ls}};
    } else {
        json fam = json::array();
        for (const auto& f : a.family) {
            std::vector<std::string> ls;
            for (int q : f) ls.push_back(a.locations[q]);
            fam.push_back(ls);
        }
        doc["acceptance"] = {{"kind", "muller"}, {"family", fam}};
    }
    doc["edges"] = json::array();
    for (const auto& e : a.edges) {
        json guard = json::array();
        for (const auto& at : e.guard.atoms)
            guard.push_back({{"clock", a.clocks[at.clock]}, {"op", to_string(at.op)}, {"const", at.constant}});
        std::vector<std::string> resets;
        for (int x : e.resets) resets.push_back(a.clocks[x]);
        doc["edges"].push_back({{"from", a.locations[e.from]},
                                {"symbol", std::vector<std::string>(e.symbol.begin(), e.symbol.end())},
                                {"guard", guard},
                                {"resets", resets},
                                {"to", a.locations[e.to]}});
    }
    return doc.dump(2) + "\n";
}

// ============================================================================
// Reports
// ============================================================================

std::string report_to_json(const VerificationReport& r) {
    json doc;
    if (r.method == "qualitative") doc["probability"] = nullptr;
    else doc["probability"] = r.probability;
    doc["method"] = r.method;
    doc["acceptance"] = r.acceptance;
    if (r.error_bound) doc["error_bound"] = *r.error_bound;
    if (r.residual) doc["residual"] = *r.residual;
    if (r.iterations) doc["iterations"] = *r.iterations;
    doc["converged"] = r.converged;
    if (r.time_bound) doc["time_bound"] = *r.time_bound;
    doc["stats"] = {{"locations", r.locations}, {"vertices", r.vertices}, {"subgraphs", r.subgraphs}};
    json timings = json::object();
    for (const auto& [phase, ms] : r.timings_ms) timings[phase] = ms;
    doc["timings_ms"] = timings;
    doc["warnings"] = r.warnings;
    if (r.simulation) {
        const auto& s = *r.simulation;
        doc["simulation"] = {{"samples", s.samples},
                             {"accepted", s.accepted},
                             {"rejected", s.rejected},
                             {"undecided", s.undecided},
                             {"half_width", s.half_width},
                             {"ci", {s.ci_low, s.ci_high}},
                             {"bracket", {s.bracket_low, s.bracket_high}},
                             {"confidence", s.confidence},
                             {"interval", s.interval},
                             {"seed", s.seed}};
    }
    if (r.qualitative) {
        doc["qualitative"] = {{"mode", r.qualitative->mode},
                              {"holds", r.qualitative->holds},
                              {"witness", r.qualitative->witness}};
    }
    return doc.dump(2) + "\n";
}

std::string report_to_text(const VerificationReport& r) {
    std::ostringstream os;
    os << std::setprecision(10);
    if (r.qualitative) {
        os << r.qualitative->mode << ": " << (r.qualitative->holds ? "holds" : "does not hold") << "\n";
        for (const auto& w : r.qualitative->witness) os << "  " << w << "\n";
    } else {
        os << "probability: " << r.probability << "\n";
    }
    os << "method: " << r.method << " (" << r.acceptance << " acceptance)\n";
    if (r.time_bound) os << "time bound: " << *r.time_bound << "\n";
    if (r.simulation) {
        const auto& s = *r.simulation;
        os << "samples: " << s.samples << " (accepted " << s.accepted << ", rejected " << s.rejected
           << ", undecided " << s.undecided << ")\n";
        os << s.confidence * 100 << "% " << s.interval << " interval: [" << s.ci_low << ", " << s.ci_high << "]\n";
    }
    if (r.error_bound) os << "error bound: " << *r.error_bound << "\n";
    if (r.residual) os << "residual: " << *r.residual << " after " << r.iterations.value_or(0) << " iterations\n";
    os << "product locations: " << r.locations << ", region vertices: " << r.vertices;
    if (r.subgraphs) os << ", subgraphs: " << r.subgraphs;
    os << "\n";
    for (const auto& [phase, ms] : r.timings_ms) os << "  " << phase << ": " << ms << " ms\n";
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    return os.str();
}

}  // namespace ctdta
