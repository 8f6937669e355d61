#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "planarize/graph.hpp"
#include "planarize/lp.hpp"
#include "planarize/oracles.hpp"

namespace planarize {

/// Augmented instance graph for conflict resolution: every edge incident on
/// the skeleton K is subdivided by artificial vertices, so cluster cuts never
/// touch K directly. Local ids; host ids threaded through to_host.
struct TildeGraph {
    Graph g;
    std::vector<int> to_host;        // local -> host id, artificial = -1
    std::vector<char> artificial;    // per local vertex
    std::vector<int> anchor;         // artificial vertex -> local K vertex
    std::map<Edge, Edge> host_edge;  // local edge -> host edge it came from
    EdgeSet artificial_edges;        // local (x, z) edges
    std::vector<char> in_k;          // local vertex is a skeleton vertex
    EdgeSet infinite_edges;          // local edges that must never be cut
};

inline TildeGraph build_tilde_graph(const Graph &host, const VertexSet &vertices,
                                    const VertexSet &k_vertices, const EdgeSet &k_edges,
                                    const EdgeSet &host_infinite) {
    TildeGraph t;
    t.to_host = vertices.items();
    std::vector<int> local_of(host.n(), -1);
    for (size_t i = 0; i < t.to_host.size(); ++i) local_of[t.to_host[i]] = static_cast<int>(i);

    int next = static_cast<int>(t.to_host.size());
    EdgeSet es;
    std::vector<std::pair<int, int>> anchors; // (artificial, anchor)
    auto add_artificial = [&](int anchor_local) {
        t.to_host.push_back(-1);
        anchors.emplace_back(next, anchor_local);
        return next++;
    };

    for (const Edge &e : edges_inside(host, vertices)) {
        bool inf = edge_in(host_infinite, e);
        int lu = local_of[e.u], lv = local_of[e.v];
        bool ku = k_vertices.contains(e.u), kv = k_vertices.contains(e.v);
        if (edge_in(k_edges, e)) {
            es.emplace_back(lu, lv);
            t.host_edge[Edge(lu, lv)] = e;
            if (inf) t.infinite_edges.emplace_back(lu, lv);
            continue;
        }
        std::vector<Edge> parts;
        if (ku && kv) {
            int z1 = add_artificial(lu), z2 = add_artificial(lv);
            parts = {Edge(lu, z1), Edge(z1, z2), Edge(z2, lv)};
            t.artificial_edges.push_back(Edge(lu, z1));
            t.artificial_edges.push_back(Edge(z2, lv));
        } else if (ku || kv) {
            int x = ku ? lu : lv, v = ku ? lv : lu;
            int z = add_artificial(x);
            parts = {Edge(x, z), Edge(z, v)};
            t.artificial_edges.push_back(Edge(x, z));
        } else {
            parts = {Edge(lu, lv)};
        }
        for (const Edge &pe : parts) {
            es.push_back(pe);
            t.host_edge[pe] = e;
            if (inf) t.infinite_edges.push_back(pe);
        }
    }
    normalize(es);
    normalize(t.artificial_edges);
    normalize(t.infinite_edges);
    t.g = Graph(static_cast<int>(t.to_host.size()), es);
    t.artificial.assign(t.g.n(), 0);
    t.anchor.assign(t.g.n(), -1);
    for (auto [z, a] : anchors) {
        t.artificial[z] = 1;
        t.anchor[z] = a;
    }
    t.in_k.assign(t.g.n(), 0);
    for (int v : k_vertices) t.in_k[local_of[v]] = 1;
    return t;
}

/// One component of tilde(G) minus K, with its attachments on the skeleton.
struct FaceCluster {
    VertexSet vertices;         // local tilde ids (includes artificial ones)
    VertexSet delta;            // local K vertices the cluster attaches to
    std::vector<int> faces;     // candidate face indices
    int type = 3;               // 1, 2 or 3
    int assigned_face = -1;
    int two_path = -1;          // index of the maximal 2-path for type 2
};

/// Components of tilde(G) minus the skeleton, with their attachments.
inline std::vector<FaceCluster> tilde_clusters(const TildeGraph &t) {
    VertexSet nonk;
    for (int v = 0; v < t.g.n(); ++v)
        if (!t.in_k[v]) nonk.insert(v);
    std::vector<FaceCluster> cs;
    for (const VertexSet &comp : connected_components(t.g, nonk)) {
        FaceCluster c;
        c.vertices = comp;
        for (int v : comp)
            if (t.artificial[v]) c.delta.insert(t.anchor[v]);
        cs.push_back(std::move(c));
    }
    return cs;
}

/// Positions of K vertices along a face boundary cycle.
struct FaceBoundary {
    std::vector<int> cycle;      // local K vertex ids in cyclic order
    std::vector<int> pos;        // per local id: position on cycle or -1
};

inline FaceBoundary make_boundary(const std::vector<int> &cycle, int n_local) {
    FaceBoundary b;
    b.cycle = cycle;
    b.pos.assign(n_local, -1);
    for (size_t i = 0; i < cycle.size(); ++i) b.pos[cycle[i]] = static_cast<int>(i);
    return b;
}

/// Independence of two clusters on a common face: delta(C) fits inside one
/// segment of the partition of the boundary induced by delta(C').
inline bool clusters_independent(const FaceBoundary &fb, const VertexSet &delta_c,
                                 const VertexSet &delta_c2) {
    std::vector<int> p2;
    for (int v : delta_c2)
        if (fb.pos[v] >= 0) p2.push_back(fb.pos[v]);
    std::sort(p2.begin(), p2.end());
    if (p2.size() <= 1) return true;
    std::vector<int> p1;
    for (int v : delta_c)
        if (fb.pos[v] >= 0) p1.push_back(fb.pos[v]);
    if (p1.size() <= 1) return true;
    int len = static_cast<int>(fb.cycle.size());
    // for each segment [p2[i], p2[i+1]] (cyclic), test containment of all p1
    for (size_t i = 0; i < p2.size(); ++i) {
        int a = p2[i], b = p2[(i + 1) % p2.size()];
        bool all_in = true;
        for (int p : p1) {
            bool inside = a <= b ? (p >= a && p <= b) : (p >= a || p <= b);
            if (!inside) {
                all_in = false;
                break;
            }
        }
        if (all_in) return true;
    }
    return false;
}

/// Pairwise conflict resolution (the assignment LP with ball rounding): cut
/// edges of C so every remaining component attaches inside one segment of
/// the boundary partition induced by delta(C'). Deterministic: the best
/// rounding radius is found by enumerating all breakpoints in (1/2, 3/5).
/// The returned cut is at most 30 times the LP optimum.
struct PairCutResult {
    EdgeSet cut;       // tilde-local edges of C
    double lp_opt = 0; // LP objective
    bool infeasible = false;
};

inline PairCutResult resolve_pair_lp(const TildeGraph &t, const FaceCluster &c,
                                     const FaceCluster &c2, const FaceBoundary &fb) {
    PairCutResult res;
    // segments of the boundary induced by delta(C')
    std::vector<int> seg_pos;
    for (int v : c2.delta)
        if (fb.pos[v] >= 0) seg_pos.push_back(fb.pos[v]);
    std::sort(seg_pos.begin(), seg_pos.end());
    int k = static_cast<int>(seg_pos.size());
    if (k <= 1) return res; // a single segment, nothing interleaves

    // segment i spans (seg_pos[i], seg_pos[i+1]); boundary vertex seg_pos[i]
    // separates segments i-1 and i
    auto classify = [&](int pos) -> std::pair<int, int> {
        // returns (gamma_i) as (i, -1), or (i, i+1 mod k) for boundary hits
        for (int i = 0; i < k; ++i)
            if (seg_pos[i] == pos) return {(i + k - 1) % k, i};
        for (int i = 0; i < k; ++i) {
            int a = seg_pos[i], b = seg_pos[(i + 1) % k];
            bool inside = a < b ? (pos > a && pos < b) : (pos > a || pos < b);
            if (inside) return {i, -1};
        }
        fail("InternalError", "attachment not on the face boundary");
    };

    // contract infinite-weight edge groups inside C
    std::vector<int> group(t.g.n(), -1);
    {
        std::vector<int> parent(t.g.n());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const Edge &e : t.infinite_edges)
            if (c.vertices.contains(e.u) && c.vertices.contains(e.v))
                parent[find(e.u)] = find(e.v);
        int ng = 0;
        std::map<int, int> gid;
        for (int v : c.vertices) {
            int r = find(v);
            if (!gid.count(r)) gid[r] = ng++;
            group[v] = gid[r];
        }
    }
    int ngroups = 0;
    for (int v : c.vertices) ngroups = std::max(ngroups, group[v] + 1);

    // per-group forced memberships from the artificial attachments
    std::vector<int> forced_seg(ngroups, -1);       // Gamma_i
    std::vector<int> forced_pair(ngroups, -1);      // Gamma_{i,i+1}: value i
    for (int v : c.vertices) {
        if (!t.artificial[v]) continue;
        int x = t.anchor[v];
        if (fb.pos[x] < 0) fail("InternalError", "cluster attaches outside the face");
        auto [i, j] = classify(fb.pos[x]);
        int gidx = group[v];
        if (j < 0) {
            if (forced_seg[gidx] != -1 && forced_seg[gidx] != i) {
                res.infeasible = true;
                return res;
            }
            forced_seg[gidx] = i;
        } else {
            // boundary vertex between segments i and j = i+1 (cyclically)
            if (forced_pair[gidx] != -1 && forced_pair[gidx] != i) {
                res.infeasible = true;
                return res;
            }
            forced_pair[gidx] = i;
        }
    }
    for (int gidx = 0; gidx < ngroups; ++gidx)
        if (forced_seg[gidx] != -1 && forced_pair[gidx] != -1) {
            int i = forced_pair[gidx];
            if (forced_seg[gidx] != i && forced_seg[gidx] != (i + 1) % k) {
                res.infeasible = true;
                return res;
            }
        }

    // cluster edges between distinct groups (unit weight each)
    std::vector<Edge> cut_candidates;
    for (const Edge &e : t.g.edges()) {
        if (!c.vertices.contains(e.u) || !c.vertices.contains(e.v)) continue;
        if (group[e.u] == group[e.v]) continue;
        cut_candidates.push_back(e);
    }

    // LP: y variables per group per segment, d variables per edge per segment
    LinearProgram lp;
    auto yvar = [&](int g0, int i) { return g0 * k + i; };
    for (int i = 0; i < ngroups * k; ++i) lp.add_var(0.0);
    int dbase = ngroups * k;
    for (size_t e = 0; e < cut_candidates.size(); ++e)
        for (int i = 0; i < k; ++i) lp.add_var(0.5);
    auto dvar = [&](size_t e, int i) { return dbase + static_cast<int>(e) * k + i; };

    for (int g0 = 0; g0 < ngroups; ++g0) {
        std::vector<std::pair<int, double>> simplex;
        for (int i = 0; i < k; ++i) simplex.emplace_back(yvar(g0, i), 1.0);
        lp.add_constraint(simplex, LinearProgram::EQ, 1.0);
        if (forced_seg[g0] != -1)
            lp.add_constraint({{yvar(g0, forced_seg[g0]), 1.0}}, LinearProgram::EQ, 1.0);
        if (forced_pair[g0] != -1) {
            int i = forced_pair[g0];
            lp.add_constraint({{yvar(g0, i), 1.0}, {yvar(g0, (i + 1) % k), 1.0}},
                              LinearProgram::EQ, 1.0);
        }
    }
    for (size_t e = 0; e < cut_candidates.size(); ++e) {
        int gu = group[cut_candidates[e].u], gv = group[cut_candidates[e].v];
        for (int i = 0; i < k; ++i) {
            lp.add_constraint({{dvar(e, i), 1.0}, {yvar(gu, i), -1.0}, {yvar(gv, i), 1.0}},
                              LinearProgram::GE, 0.0);
            lp.add_constraint({{dvar(e, i), 1.0}, {yvar(gu, i), 1.0}, {yvar(gv, i), -1.0}},
                              LinearProgram::GE, 0.0);
        }
    }
    auto sol = lp.solve();
    if (!sol.feasible) {
        res.infeasible = true;
        return res;
    }
    res.lp_opt = sol.objective;

    // ball rounding over all breakpoints of r in (1/2, 3/5)
    std::vector<double> breakpoints{0.5, 0.6};
    for (int g0 = 0; g0 < ngroups; ++g0)
        for (int i = 0; i < k; ++i) {
            double y = sol.x[yvar(g0, i)];
            if (y > 0.5 && y < 0.6) breakpoints.push_back(y);
            double pairsum = 0.6 * (y + sol.x[yvar(g0, (i + 1) % k)]);
            if (pairsum > 0.5 && pairsum < 0.6) breakpoints.push_back(pairsum);
        }
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> candidates;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
        candidates.push_back(0.5 * (breakpoints[i] + breakpoints[i + 1]));

    auto cut_for = [&](double r) {
        // assign each group to a segment via the balls
        std::vector<int> assign(ngroups, -1);
        for (int g0 = 0; g0 < ngroups; ++g0) {
            for (int i = 0; i < k && assign[g0] < 0; ++i)
                if (sol.x[yvar(g0, i)] >= r) assign[g0] = i;
            if (assign[g0] >= 0) continue;
            for (int i = 0; i < k && assign[g0] < 0; ++i) {
                double pairsum = sol.x[yvar(g0, i)] + sol.x[yvar(g0, (i + 1) % k)];
                if (pairsum >= 5.0 * r / 3.0) assign[g0] = i; // ball B_{i,i+1} -> sigma_i
            }
        }
        EdgeSet cut;
        for (const Edge &e : cut_candidates) {
            int gu = group[e.u], gv = group[e.v];
            if (assign[gu] != assign[gv] || assign[gu] == -1 || assign[gv] == -1) {
                // crossing some ball boundary; unassigned endpoints also count
                if (assign[gu] != assign[gv]) cut.push_back(e);
            }
        }
        normalize(cut);
        return cut;
    };

    EdgeSet best;
    bool have = false;
    for (double r : candidates) {
        EdgeSet cand = cut_for(r);
        if (!have || cand.size() < best.size()) {
            best = cand;
            have = true;
        }
    }
    res.cut = best;
    require(static_cast<double>(res.cut.size()) <= 30.0 * res.lp_opt + 1e-6, "InternalError",
            "rounding exceeded the 30x factor");
    return res;
}

/// Label-spreading substitute for clusters too large for the dense LP: each
/// infinite-edge group takes the segment of its nearest forced attachment.
/// Valid assignment, no factor claim (mode is recorded by the caller).
inline PairCutResult heuristic_pair_cut(const TildeGraph &t, const FaceCluster &c,
                                        const FaceCluster &c2, const FaceBoundary &fb) {
    PairCutResult res;
    std::vector<int> seg_pos;
    for (int v : c2.delta)
        if (fb.pos[v] >= 0) seg_pos.push_back(fb.pos[v]);
    std::sort(seg_pos.begin(), seg_pos.end());
    int k = static_cast<int>(seg_pos.size());
    if (k <= 1) return res;
    auto classify = [&](int pos) -> std::pair<int, int> {
        for (int i = 0; i < k; ++i)
            if (seg_pos[i] == pos) return {(i + k - 1) % k, i};
        for (int i = 0; i < k; ++i) {
            int a = seg_pos[i], b = seg_pos[(i + 1) % k];
            bool inside = a < b ? (pos > a && pos < b) : (pos > a || pos < b);
            if (inside) return {i, -1};
        }
        fail("InternalError", "attachment not on the face boundary");
    };

    // groups under infinite edges
    std::vector<int> parent(t.g.n());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge &e : t.infinite_edges)
        if (c.vertices.contains(e.u) && c.vertices.contains(e.v)) parent[find(e.u)] = find(e.v);

    std::map<int, int> label; // group root -> segment
    std::vector<std::pair<int, int>> frontier;
    for (int v : c.vertices) {
        if (!t.artificial[v]) continue;
        auto [i, j] = classify(fb.pos[t.anchor[v]]);
        int root = find(v);
        int want = j < 0 ? i : i; // boundary hits may take either; pick sigma_i
        auto it = label.find(root);
        if (it == label.end()) {
            label[root] = want;
            frontier.emplace_back(v, want);
        } else if (it->second != want && j < 0) {
            // conflicting hard constraints inside one infinite group
            auto [i2, j2] = classify(fb.pos[t.anchor[v]]);
            if (j2 < 0 && it->second != i2) {
                res.infeasible = true;
                return res;
            }
        }
    }
    // BFS spread over the cluster
    std::vector<int> seg_of(t.g.n(), -1);
    for (int v : c.vertices)
        if (label.count(find(v))) seg_of[v] = label[find(v)];
    std::vector<int> queue;
    for (int v : c.vertices)
        if (seg_of[v] >= 0) queue.push_back(v);
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (int w : t.g.neighbors(v)) {
            if (!c.vertices.contains(w) || seg_of[w] >= 0) continue;
            seg_of[w] = seg_of[v];
            // spread through the whole infinite group at once
            for (int u : c.vertices)
                if (seg_of[u] < 0 && find(u) == find(w)) {
                    seg_of[u] = seg_of[v];
                    queue.push_back(u);
                }
            queue.push_back(w);
        }
    }
    for (int v : c.vertices)
        if (seg_of[v] < 0) seg_of[v] = 0;
    for (const Edge &e : t.g.edges()) {
        if (!c.vertices.contains(e.u) || !c.vertices.contains(e.v)) continue;
        if (seg_of[e.u] != seg_of[e.v]) res.cut.push_back(e);
    }
    normalize(res.cut);
    if (!edge_intersect(res.cut, t.infinite_edges).empty()) {
        res.infeasible = true;
        res.cut.clear();
    }
    return res;
}

} // namespace planarize
