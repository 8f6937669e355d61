#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "planarize/graph.hpp"
#include "planarize/oracles.hpp"
#include "planarize/planarity.hpp"
#include "planarize/solve.hpp"
#include "planarize/well_linked.hpp"

namespace planarize {

using json = nlohmann::ordered_json;

/// Edge-list text format: first line "n m", then m lines "u v" (0-indexed).
inline Graph parse_edge_list(std::istream &in) {
    std::string line;
    long long n = -1, m = -1;
    std::vector<std::pair<int, int>> pairs;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n >> m)) fail("MalformedHeader", "expected 'n m' header");
            require(n >= 0 && m >= 0, "MalformedHeader", "negative counts");
            continue;
        }
        long long u, v;
        if (!(ls >> u >> v)) {
            std::string rest;
            std::istringstream probe(line);
            if (probe >> rest) fail("ParseError", "bad edge line: " + line);
            continue; // blank line
        }
        pairs.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    require(n >= 0, "MalformedHeader", "empty input");
    require(static_cast<long long>(pairs.size()) == m, "ParseError",
            "edge count does not match the header");
    return build_graph(static_cast<int>(n), pairs);
}

inline Graph parse_edge_list(const std::string &text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

/// Writer mirrors the reader bit-exactly: sorted edges, '\n' separators.
inline std::string write_edge_list(const Graph &g) {
    std::ostringstream out;
    out << g.n() << ' ' << g.m() << '\n';
    for (const Edge &e : g.edges()) out << e.u << ' ' << e.v << '\n';
    return out.str();
}

/// graph6: standard ASCII encoding of the upper-triangular adjacency bits.
inline Graph parse_graph6(const std::string &line) {
    std::string s = line;
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    if (s.rfind(">>graph6<<", 0) == 0) s = s.substr(10);
    require(!s.empty(), "ParseError", "empty graph6 string");
    size_t pos = 0;
    long long n;
    if (s[0] == '~') {
        require(s.size() >= 4, "ParseError", "truncated graph6 size");
        if (s[1] == '~') {
            require(s.size() >= 8, "ParseError", "truncated graph6 size");
            n = 0;
            for (int i = 2; i < 8; ++i) n = (n << 6) | (s[i] - 63);
            pos = 8;
        } else {
            n = 0;
            for (int i = 1; i < 4; ++i) n = (n << 6) | (s[i] - 63);
            pos = 4;
        }
    } else {
        n = s[0] - 63;
        pos = 1;
    }
    require(n >= 0 && n <= 100000, "ParseError", "graph6 size out of range");
    long long bits_needed = n * (n - 1) / 2;
    std::vector<char> bits;
    bits.reserve(bits_needed + 6);
    for (size_t i = pos; i < s.size(); ++i) {
        int c = s[i] - 63;
        require(c >= 0 && c < 64, "ParseError", "bad graph6 character");
        for (int b = 5; b >= 0; --b) bits.push_back((c >> b) & 1);
    }
    require(static_cast<long long>(bits.size()) >= bits_needed, "ParseError",
            "graph6 body too short");
    std::vector<std::pair<int, int>> pairs;
    long long k = 0;
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u, ++k)
            if (bits[k]) pairs.emplace_back(u, v);
    return build_graph(static_cast<int>(n), pairs);
}

inline std::string write_graph6(const Graph &g) {
    std::string s;
    int n = g.n();
    require(n <= 62, "OutOfRange", "writer supports n <= 62");
    s.push_back(static_cast<char>(n + 63));
    std::vector<char> bits;
    for (int v = 1; v < n; ++v)
        for (int u = 0; u < v; ++u) bits.push_back(g.has_edge(u, v) ? 1 : 0);
    while (bits.size() % 6 != 0) bits.push_back(0);
    for (size_t i = 0; i < bits.size(); i += 6) {
        int c = 0;
        for (int b = 0; b < 6; ++b) c = (c << 1) | bits[i + b];
        s.push_back(static_cast<char>(c + 63));
    }
    return s;
}

inline Graph load_graph(const std::string &path, const std::string &format) {
    std::ifstream in(path);
    require(in.good(), "Io", "cannot open " + path);
    if (format == "graph6") {
        std::string line;
        std::getline(in, line);
        return parse_graph6(line);
    }
    return parse_edge_list(in);
}

// ---- JSON serialization ---------------------------------------------------

inline json to_json(const EdgeSet &es) {
    json a = json::array();
    for (const Edge &e : es) a.push_back({e.u, e.v});
    return a;
}

inline json to_json(const RotationSystem &rs) {
    json rot = json::object();
    for (size_t v = 0; v < rs.rotation.size(); ++v)
        rot[std::to_string(v)] = rs.rotation[v];
    json faces = json::array();
    for (const Face &f : rs.faces) {
        json walks = json::array();
        for (const auto &w : f.walks) walks.push_back(w);
        faces.push_back(walks);
    }
    return json{{"rotation", rot}, {"faces", faces}, {"outer_face", rs.outer_face}};
}

inline json to_json(const WellLinkedCertificate &c) {
    json j{{"alpha", c.alpha},
           {"well_linked", c.well_linked},
           {"mode", oracle_mode_name(c.mode)}};
    if (!c.well_linked) {
        j["j1"] = c.set_j.empty() ? json::array() : json(c.j1.items());
        j["j2"] = json(c.j2.items());
        j["cut"] = to_json(c.cut);
        j["t1"] = c.t1;
        j["t2"] = c.t2;
    }
    return j;
}

inline json min_uncut_to_json(int n_vars, const std::vector<MinUncutConstraint> &cs) {
    json arr = json::array();
    for (const auto &c : cs) arr.push_back({{"a", c.a}, {"b", c.b}, {"w", c.w}});
    return json{{"vars", n_vars}, {"constraints", arr}};
}

inline std::pair<int, std::vector<MinUncutConstraint>> min_uncut_from_json(const json &j) {
    std::vector<MinUncutConstraint> cs;
    for (const auto &c : j.at("constraints"))
        cs.push_back({c.at("a").get<int>(), c.at("b").get<int>(), c.at("w").get<long long>()});
    return {j.at("vars").get<int>(), cs};
}

inline json to_json(const Parameters &p) {
    return json{{"n", p.n},
                {"d_max", p.d_max},
                {"opt_guess", p.opt},
                {"sigma", p.sigma},
                {"alpha_star", p.alpha_star},
                {"beta_fcg", p.beta_fcg},
                {"rho", p.rho},
                {"case2_threshold", p.case2_threshold},
                {"comp_terminal_bound", p.comp_terminal_bound},
                {"m_star", p.m_star},
                {"path_count", p.path_count},
                {"nasty_coeff", p.nasty_coeff},
                {"stop_size", p.stop_size},
                {"h_star", p.h_star}};
}

inline json run_report(const Graph &g, const SolveConfig &cfg, const SolveResult &r) {
    json iterations = json::array();
    for (const GuessReport &gr : r.guesses) {
        json iters = json::array();
        for (const IterationReport &ir : gr.iterations)
            iters.push_back(json{{"h", ir.h},
                                 {"instances", ir.instances},
                                 {"cases",
                                  {{"small", ir.case_small},
                                   {"c1", ir.case1},
                                   {"c2", ir.case2},
                                   {"c3", ir.case3},
                                   {"c4", ir.case4},
                                   {"fallbacks", ir.fallbacks}}},
                                 {"E1", ir.e1},
                                 {"E2", ir.e2},
                                 {"Estar", ir.estar},
                                 {"resamples", ir.resamples}});
        iterations.push_back(json{{"opt_guess", gr.guess},
                                  {"stage", gr.stage},
                                  {"ok", gr.ok},
                                  {"nasty", gr.nasty},
                                  {"size", gr.size},
                                  {"failure", gr.failure},
                                  {"stopping_calls", gr.stopping_calls},
                                  {"iterations", iters}});
    }
    json baselines{{"stopping", r.baseline_stopping},
                   {"trivial", r.baseline_trivial},
                   {"exhaustive", r.baseline_exhaustive}};
    return json{{"input", {{"n", g.n()}, {"m", g.m()}, {"d_max", g.d_max()}}},
                {"seed", cfg.seed},
                {"sigma", cfg.sigma},
                {"oracle", cfg.oracle == OracleMode::Exact ? "exact" : "heuristic"},
                {"parameters", to_json(r.params)},
                {"stages", r.stages},
                {"guesses", iterations},
                {"final",
                 {{"E_star", to_json(r.e_star)},
                  {"size", r.e_star.size()},
                  {"verified", r.verified},
                  {"source", r.best_source},
                  {"best_guess", r.best_guess},
                  {"baseline_sizes", baselines}}},
                {"notes", r.notes}};
}

} // namespace planarize
