#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "planarize/graph.hpp"
#include "planarize/lp.hpp"
#include "planarize/oracles.hpp"
#include "planarize/rng.hpp"

namespace planarize {

/// Concurrent multicommodity routing between terminal edges: every unordered
/// pair of terminals carries one unit split over weighted paths. Paths are
/// stored as edge lists of the host graph (terminal edges included), so
/// unions of sampled paths assemble directly into skeleton cycles.
struct FlowRouting {
    struct PathEntry {
        std::vector<Edge> edges;
        double weight = 0.0;
    };

    EdgeSet terminals;
    std::map<std::pair<int, int>, std::vector<PathEntry>> pair_paths; // key: (i,j), i<j
    std::map<Edge, double> edge_congestion;
    std::map<int, double> vertex_congestion;
    double max_edge_congestion = 0.0;
    double max_vertex_congestion = 0.0;
    OracleMode mode = OracleMode::Heuristic;

    void account(const PathEntry &p) {
        VertexSet verts;
        for (const Edge &e : p.edges) {
            edge_congestion[e] += p.weight;
            verts.insert(e.u);
            verts.insert(e.v);
        }
        for (int v : verts) vertex_congestion[v] += p.weight;
        for (auto &[e, c] : edge_congestion) max_edge_congestion = std::max(max_edge_congestion, c);
        for (auto &[v, c] : vertex_congestion)
            max_vertex_congestion = std::max(max_vertex_congestion, c);
    }
};

namespace detail {

// subdivided routing graph: terminal edge i becomes stub vertex n + i
struct RoutingGraph {
    Graph g;
    int n_host;
    int stub(int term_idx) const { return n_host + term_idx; }
};

inline RoutingGraph build_routing_graph(const Graph &host, const EdgeSet &terminals) {
    EdgeSet es = edge_minus(host.edges(), terminals);
    int n = host.n();
    for (size_t i = 0; i < terminals.size(); ++i) {
        es.emplace_back(terminals[i].u, n + static_cast<int>(i));
        es.emplace_back(terminals[i].v, n + static_cast<int>(i));
    }
    normalize(es);
    return {Graph(n + static_cast<int>(terminals.size()), es), n};
}

// translate a stub-graph vertex path back to host edges
inline std::vector<Edge> host_edges_of_path(const RoutingGraph &rg, const EdgeSet &terminals,
                                            const std::vector<int> &path) {
    std::vector<Edge> out;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        int a = path[i], b = path[i + 1];
        if (a >= rg.n_host || b >= rg.n_host)
            out.push_back(terminals[std::max(a, b) - rg.n_host]);
        else
            out.emplace_back(a, b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

/// Route one unit between every unordered pair of terminal edges.
/// Exact mode solves the min-congestion LP (tiny instances only); heuristic
/// mode routes congestion-aware shortest paths with a rerouting sweep.
inline FlowRouting route_concurrent_flow(const Graph &host, const EdgeSet &terminals,
                                         double target_congestion, const OracleConfig &cfg) {
    require(terminals.size() >= 2, "DisconnectedTerminals", "need at least two terminals");
    for (const Edge &t : terminals)
        require(edge_in(host.edges(), t), "OutOfRange", "terminal edge not in graph");

    detail::RoutingGraph rg = detail::build_routing_graph(host, terminals);
    int q = static_cast<int>(terminals.size());

    FlowRouting routing;
    routing.terminals = terminals;
    routing.mode = cfg.mode;

    if (cfg.mode == OracleMode::Exact) {
        require(q <= 8 && host.m() <= 48, "TooLargeForExact",
                "concurrent-flow LP above exhaustive threshold");
        // variables: per commodity, per directed arc; plus lambda
        const EdgeSet &es = rg.g.edges();
        int m = static_cast<int>(es.size());
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < q; ++i)
            for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
        int k = static_cast<int>(pairs.size());
        LinearProgram lp;
        // var layout: commodity c, arc 2e (u->v) and 2e+1 (v->u)
        auto var = [&](int c, int arc) { return c * 2 * m + arc; };
        for (int i = 0; i < k * 2 * m; ++i) lp.add_var(0.0);
        int lambda = lp.add_var(1.0);
        for (int c = 0; c < k; ++c) {
            int s = rg.stub(pairs[c].first), t = rg.stub(pairs[c].second);
            for (int v = 0; v < rg.g.n(); ++v) {
                std::vector<std::pair<int, double>> terms;
                for (int e = 0; e < m; ++e) {
                    if (es[e].u == v) {
                        terms.emplace_back(var(c, 2 * e), 1.0);      // out u->v... u==v means out
                        terms.emplace_back(var(c, 2 * e + 1), -1.0); // in
                    } else if (es[e].v == v) {
                        terms.emplace_back(var(c, 2 * e + 1), 1.0);
                        terms.emplace_back(var(c, 2 * e), -1.0);
                    }
                }
                double rhs = v == s ? 1.0 : (v == t ? -1.0 : 0.0);
                lp.add_constraint(terms, LinearProgram::EQ, rhs);
            }
        }
        for (int e = 0; e < m; ++e) {
            std::vector<std::pair<int, double>> terms;
            for (int c = 0; c < k; ++c) {
                terms.emplace_back(var(c, 2 * e), 1.0);
                terms.emplace_back(var(c, 2 * e + 1), 1.0);
            }
            terms.emplace_back(lambda, -1.0);
            lp.add_constraint(terms, LinearProgram::LE, 0.0);
        }
        auto sol = lp.solve();
        require(sol.feasible, "DisconnectedTerminals", "concurrent-flow LP infeasible");

        // decompose each commodity into weighted paths
        for (int c = 0; c < k; ++c) {
            int s = rg.stub(pairs[c].first), t = rg.stub(pairs[c].second);
            std::map<std::pair<int, int>, double> f;
            for (int e = 0; e < m; ++e) {
                double fw = sol.x[var(c, 2 * e)], bw = sol.x[var(c, 2 * e + 1)];
                double net = fw - bw;
                if (net > 1e-9) f[{es[e].u, es[e].v}] = net;
                else if (net < -1e-9) f[{es[e].v, es[e].u}] = -net;
            }
            std::vector<FlowRouting::PathEntry> entries;
            double shipped = 0.0;
            while (shipped < 1.0 - 1e-6) {
                // walk positive arcs from s; cancel any flow cycle on sight
                std::vector<int> walk{s};
                std::vector<int> pos(rg.g.n(), -1);
                pos[s] = 0;
                bool ok = true;
                while (walk.back() != t) {
                    int v = walk.back();
                    int next = -1;
                    for (auto &[arc, fl] : f)
                        if (arc.first == v && fl > 1e-9) { next = arc.second; break; }
                    if (next == -1) { ok = false; break; }
                    if (pos[next] >= 0) {
                        // cycle: subtract its bottleneck and truncate the walk
                        double cyc = f[{v, next}];
                        for (int i = pos[next]; i + 1 < static_cast<int>(walk.size()); ++i)
                            cyc = std::min(cyc, f[{walk[i], walk[i + 1]}]);
                        f[{v, next}] -= cyc;
                        for (int i = pos[next]; i + 1 < static_cast<int>(walk.size()); ++i)
                            f[{walk[i], walk[i + 1]}] -= cyc;
                        while (static_cast<int>(walk.size()) > pos[next] + 1) {
                            pos[walk.back()] = -1;
                            walk.pop_back();
                        }
                        continue;
                    }
                    pos[next] = static_cast<int>(walk.size());
                    walk.push_back(next);
                }
                if (!ok) break;
                double cap = 1.0 - shipped;
                for (size_t i = 0; i + 1 < walk.size(); ++i)
                    cap = std::min(cap, f[{walk[i], walk[i + 1]}]);
                if (cap < 1e-9) break;
                for (size_t i = 0; i + 1 < walk.size(); ++i) f[{walk[i], walk[i + 1]}] -= cap;
                FlowRouting::PathEntry pe;
                pe.edges = detail::host_edges_of_path(rg, terminals, walk);
                pe.weight = cap;
                entries.push_back(pe);
                shipped += cap;
            }
            require(shipped > 1 - 1e-4, "DisconnectedTerminals",
                    "could not decompose a full unit of flow");
            // normalize drift, then scale to one unit per ordered direction
            double tot = 0;
            for (auto &pe : entries) tot += pe.weight;
            for (auto &pe : entries) pe.weight *= 2.0 / tot;
            for (const auto &pe : entries) routing.account(pe);
            routing.pair_paths[pairs[c]] = std::move(entries);
        }
        return routing;
    }

    // heuristic: congestion-aware shortest paths plus one rerouting sweep
    std::map<Edge, double> load;
    auto dijkstra = [&](int s, int t) -> std::vector<int> {
        int n = rg.g.n();
        std::vector<double> dist(n, 1e18);
        std::vector<int> prev(n, -1);
        std::vector<char> done(n, 0);
        dist[s] = 0;
        for (int round = 0; round < n; ++round) {
            int v = -1;
            for (int i = 0; i < n; ++i)
                if (!done[i] && (v == -1 || dist[i] < dist[v])) v = i;
            if (v == -1 || dist[v] >= 1e18) break;
            done[v] = 1;
            if (v == t) break;
            for (int w : rg.g.neighbors(v)) {
                double cost = 1.0 + load[Edge(v, w)] * load[Edge(v, w)];
                if (dist[v] + cost < dist[w] - 1e-12) {
                    dist[w] = dist[v] + cost;
                    prev[w] = v;
                }
            }
        }
        if (dist[t] >= 1e18) return {};
        std::vector<int> path;
        for (int v = t; v != -1; v = prev[v]) path.push_back(v);
        std::reverse(path.begin(), path.end());
        return path;
    };

    std::map<std::pair<int, int>, std::vector<int>> raw_paths;
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) {
            auto p = dijkstra(rg.stub(i), rg.stub(j));
            require(!p.empty(), "DisconnectedTerminals", "terminal pair not connected");
            for (size_t x = 0; x + 1 < p.size(); ++x) load[Edge(p[x], p[x + 1])] += 1.0;
            raw_paths[{i, j}] = std::move(p);
        }
    // rerouting sweeps while above target
    for (int sweep = 0; sweep < 3; ++sweep) {
        double worst = 0;
        for (auto &[e, c] : load) worst = std::max(worst, c);
        if (worst <= target_congestion) break;
        for (auto &[key, p] : raw_paths) {
            for (size_t x = 0; x + 1 < p.size(); ++x) load[Edge(p[x], p[x + 1])] -= 1.0;
            auto np = dijkstra(rg.stub(key.first), rg.stub(key.second));
            if (!np.empty()) p = std::move(np);
            for (size_t x = 0; x + 1 < p.size(); ++x) load[Edge(p[x], p[x + 1])] += 1.0;
        }
    }
    for (auto &[key, p] : raw_paths) {
        FlowRouting::PathEntry pe;
        pe.edges = detail::host_edges_of_path(rg, terminals, p);
        pe.weight = 2.0; // one unit per ordered direction
        routing.account(pe);
        routing.pair_paths[key] = {pe};
    }
    return routing;
}

/// Sample one path for a routed pair from the distribution induced by the
/// path weights. Deterministic under a fixed rng state.
inline std::vector<Edge> sample_path(const FlowRouting &routing, std::pair<int, int> pair,
                                     Rng &rng) {
    if (pair.first > pair.second) std::swap(pair.first, pair.second);
    auto it = routing.pair_paths.find(pair);
    require(it != routing.pair_paths.end() && !it->second.empty(), "NoFlowForPair",
            "pair has no routed flow");
    double total = 0;
    for (const auto &pe : it->second) total += pe.weight;
    require(total > 1e-12, "NoFlowForPair", "pair has zero routed demand");
    double roll = rng.next_real() * total;
    for (const auto &pe : it->second) {
        roll -= pe.weight;
        if (roll <= 0) return pe.edges;
    }
    return it->second.back().edges;
}

} // namespace planarize
