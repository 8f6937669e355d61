#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "planarize/graph.hpp"

namespace planarize {

/// One face of a combinatorial embedding. A face is a set of closed directed
/// walks (almost always one; the merged outer face of a disconnected graph
/// carries one walk per component, and an isolated vertex contributes a
/// single-vertex walk with no darts).
struct Face {
    std::vector<std::vector<int>> walks;

    VertexSet vertex_set() const {
        std::vector<int> vs;
        for (const auto &w : walks) vs.insert(vs.end(), w.begin(), w.end());
        return VertexSet(std::move(vs));
    }
    EdgeSet edge_set() const {
        EdgeSet es;
        for (const auto &w : walks) {
            if (w.size() < 2) continue;
            for (size_t i = 0; i < w.size(); ++i)
                es.emplace_back(w[i], w[(i + 1) % w.size()]);
        }
        normalize(es);
        return es;
    }
};

/// Combinatorial embedding: cyclic neighbor order per vertex plus the face
/// list derived from it. Satisfies n - m + f = 1 + c on planar inputs.
struct RotationSystem {
    std::vector<std::vector<int>> rotation;
    std::vector<Face> faces;
    int outer_face = 0;

    int face_count() const { return static_cast<int>(faces.size()); }
};

namespace detail {

// Faces induced by a rotation system: orbits of (u,v) -> (v, succ_v(u)).
// Per component, the walk containing the smallest dart is designated the
// component's outer walk; all outer walks merge into faces[0].
inline std::vector<Face> trace_faces(const Graph &g,
                                     const std::vector<std::vector<int>> &rot,
                                     std::vector<int> *face_per_component = nullptr) {
    int n = g.n();
    std::vector<std::vector<int>> pos(n); // pos[v][i]: index of rot[v][i] lookup
    std::vector<std::vector<int>> succ(n);
    for (int v = 0; v < n; ++v) {
        int d = static_cast<int>(rot[v].size());
        succ[v].resize(d);
    }
    auto idx_of = [&](int v, int u) {
        const auto &r = rot[v];
        for (size_t i = 0; i < r.size(); ++i)
            if (r[i] == u) return static_cast<int>(i);
        fail("InternalError", "rotation misses neighbor");
    };

    // component labels
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] != -1) continue;
        std::vector<int> stack{s};
        comp[s] = ncomp;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : g.neighbors(v))
                if (comp[w] == -1) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
        }
        ++ncomp;
    }

    // dart ids: for edge list index e, dart 2e = (u->v), 2e+1 = (v->u)
    const EdgeSet &es = g.edges();
    std::vector<char> used(2 * es.size(), 0);
    std::vector<std::vector<int>> walks;
    std::vector<int> walk_comp;

    auto dart_dst = [&](int d) { return d % 2 == 0 ? es[d / 2].v : es[d / 2].u; };
    auto dart_src = [&](int d) { return d % 2 == 0 ? es[d / 2].u : es[d / 2].v; };

    // edge id lookup
    auto edge_id = [&](int u, int v) {
        Edge e(u, v);
        auto it = std::lower_bound(es.begin(), es.end(), e);
        return static_cast<int>(it - es.begin());
    };

    for (size_t d0 = 0; d0 < used.size(); ++d0) {
        if (used[d0]) continue;
        std::vector<int> walk;
        int d = static_cast<int>(d0);
        while (!used[d]) {
            used[d] = 1;
            int u = dart_src(d), v = dart_dst(d);
            walk.push_back(u);
            int i = idx_of(v, u);
            int w = rot[v][(i + 1) % rot[v].size()];
            int eid = edge_id(v, w);
            d = (es[eid].u == v) ? 2 * eid : 2 * eid + 1;
        }
        walk_comp.push_back(comp[walk.front()]);
        walks.push_back(std::move(walk));
    }
    // isolated vertices: single-vertex walk
    for (int v = 0; v < n; ++v)
        if (g.degree(v) == 0) {
            walks.push_back({v});
            walk_comp.push_back(comp[v]);
        }

    // choose one outer walk per component: the first traced walk of it
    std::vector<int> outer_walk(ncomp, -1);
    for (size_t w = 0; w < walks.size(); ++w)
        if (outer_walk[walk_comp[w]] == -1) outer_walk[walk_comp[w]] = static_cast<int>(w);

    std::vector<Face> faces;
    Face outer;
    for (int c = 0; c < ncomp; ++c)
        if (outer_walk[c] != -1) outer.walks.push_back(walks[outer_walk[c]]);
    faces.push_back(std::move(outer));
    std::vector<int> fpc(ncomp, 0);
    for (size_t w = 0; w < walks.size(); ++w) {
        ++fpc[walk_comp[w]];
        if (static_cast<int>(w) == outer_walk[walk_comp[w]]) continue;
        Face f;
        f.walks.push_back(walks[w]);
        faces.push_back(std::move(f));
    }
    if (face_per_component) *face_per_component = fpc;
    return faces;
}

// Demoucron-Malgrange-Pertuiset planar embedding of one 2-connected block
// (local ids, >= 3 vertices). Returns per-vertex rotations, or nullopt when
// the block is not planar. Intermediate faces are simple cycles because the
// embedded subgraph grows by ears.
inline std::optional<std::vector<std::vector<int>>> embed_block(const Graph &g) {
    int n = g.n();
    if (g.m() > 3 * n - 6) return std::nullopt;

    // initial cycle: BFS tree plus any non-tree edge, closed through the LCA
    std::vector<int> parent(n, -1), depth(n, -1);
    std::vector<int> cyc;
    {
        std::vector<int> queue{0};
        depth[0] = 0;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            for (int w : g.neighbors(v))
                if (depth[w] == -1) {
                    depth[w] = depth[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                }
        }
        int ca = -1, cb = -1;
        for (const Edge &e : g.edges())
            if (parent[e.u] != e.v && parent[e.v] != e.u) {
                ca = e.u;
                cb = e.v;
                break;
            }
        if (ca < 0) return std::nullopt; // a tree: caller passed a non-2-connected block
        std::vector<int> up_a, up_b;
        int x = ca, y = cb;
        while (depth[x] > depth[y]) { up_a.push_back(x); x = parent[x]; }
        while (depth[y] > depth[x]) { up_b.push_back(y); y = parent[y]; }
        while (x != y) {
            up_a.push_back(x);
            up_b.push_back(y);
            x = parent[x];
            y = parent[y];
        }
        cyc = up_a;
        cyc.push_back(x);
        cyc.insert(cyc.end(), up_b.rbegin(), up_b.rend());
    }

    std::vector<std::vector<int>> faces; // each a simple directed cycle
    faces.push_back(cyc);
    faces.emplace_back(cyc.rbegin(), cyc.rend());

    std::vector<char> emb_v(n, 0);
    for (int v : cyc) emb_v[v] = 1;
    EdgeSet emb_e;
    for (size_t i = 0; i < cyc.size(); ++i) emb_e.emplace_back(cyc[i], cyc[(i + 1) % cyc.size()]);
    normalize(emb_e);

    while (static_cast<int>(emb_e.size()) < g.m()) {
        // bridges: chords between embedded vertices, and components of
        // non-embedded vertices with their attachment edges
        struct Bridge {
            VertexSet attachments;
            std::vector<int> inner; // non-embedded vertices, empty for chords
            Edge chord{-1, -1};
        };
        std::vector<Bridge> bridges;
        for (const Edge &e : g.edges())
            if (!edge_in(emb_e, e) && emb_v[e.u] && emb_v[e.v]) {
                Bridge b;
                b.attachments.insert(e.u);
                b.attachments.insert(e.v);
                b.chord = e;
                bridges.push_back(std::move(b));
            }
        std::vector<int> compid(n, -1);
        for (int s = 0; s < n; ++s) {
            if (emb_v[s] || compid[s] != -1) continue;
            Bridge b;
            std::vector<int> stack{s};
            compid[s] = static_cast<int>(bridges.size());
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                b.inner.push_back(v);
                for (int w : g.neighbors(v)) {
                    if (emb_v[w]) b.attachments.insert(w);
                    else if (compid[w] == -1) {
                        compid[w] = compid[s];
                        stack.push_back(w);
                    }
                }
            }
            std::sort(b.inner.begin(), b.inner.end());
            bridges.push_back(std::move(b));
        }

        // admissible faces per bridge
        int best = -1, best_count = -1, best_face = -1;
        for (size_t bi = 0; bi < bridges.size(); ++bi) {
            int count = 0, first = -1;
            for (size_t fi = 0; fi < faces.size(); ++fi) {
                VertexSet fv(std::vector<int>(faces[fi].begin(), faces[fi].end()));
                if (bridges[bi].attachments.subset_of(fv)) {
                    ++count;
                    if (first == -1) first = static_cast<int>(fi);
                }
            }
            if (count == 0) return std::nullopt; // no admissible face: non-planar
            if (best == -1 || count < best_count) {
                best = static_cast<int>(bi);
                best_count = count;
                best_face = first;
            }
        }

        // path through the chosen bridge between two attachments
        const Bridge &br = bridges[best];
        std::vector<int> path;
        if (br.inner.empty()) {
            path = {br.chord.u, br.chord.v};
        } else {
            int a = br.attachments.items().front();
            // BFS from a through inner vertices to another attachment
            std::vector<int> prev(n, -2);
            std::vector<int> queue;
            prev[a] = -1;
            for (int w : g.neighbors(a))
                if (!emb_v[w] && compid[w] == best && prev[w] == -2) {
                    prev[w] = a;
                    queue.push_back(w);
                }
            int hit = -1;
            for (size_t qi = 0; qi < queue.size() && hit == -1; ++qi) {
                int v = queue[qi];
                for (int w : g.neighbors(v)) {
                    if (prev[w] != -2 || w == a) continue;
                    if (emb_v[w]) {
                        if (br.attachments.contains(w)) { prev[w] = v; hit = w; break; }
                        continue;
                    }
                    if (compid[w] == best) {
                        prev[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            if (hit == -1) return std::nullopt; // single attachment: not 2-connected
            for (int v = hit; v != -1; v = prev[v]) path.push_back(v);
            std::reverse(path.begin(), path.end());
        }

        // split face best_face along path
        int a = path.front(), b = path.back();
        const std::vector<int> &fw = faces[best_face];
        int ia = -1, ib = -1;
        for (size_t i = 0; i < fw.size(); ++i) {
            if (fw[i] == a && ia < 0) ia = static_cast<int>(i);
            if (fw[i] == b && ib < 0) ib = static_cast<int>(i);
        }
        int len = static_cast<int>(fw.size());
        std::vector<int> f1, f2;
        // f1: path a..b, then face walk from b around to a (exclusive)
        f1 = path;
        for (int i = (ib + 1) % len; i != ia; i = (i + 1) % len) f1.push_back(fw[i]);
        // f2: reverse path b..a, then face walk from a around to b (exclusive)
        f2.assign(path.rbegin(), path.rend());
        for (int i = (ia + 1) % len; i != ib; i = (i + 1) % len) f2.push_back(fw[i]);
        faces[best_face] = std::move(f1);
        faces.push_back(std::move(f2));

        for (int v : path) emb_v[v] = 1;
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            emb_e.emplace_back(path[i], path[i + 1]);
        }
        normalize(emb_e);
    }

    // recover rotations: succ_v(u) = w when some face has ...,u,v,w,...
    std::vector<std::vector<std::pair<int, int>>> succ(n); // at v: (u -> w)
    for (const auto &f : faces) {
        int len = static_cast<int>(f.size());
        for (int i = 0; i < len; ++i) {
            int u = f[i], v = f[(i + 1) % len], w = f[(i + 2) % len];
            succ[v].emplace_back(u, w);
        }
    }
    std::vector<std::vector<int>> rot(n);
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) == 0) continue;
        // walk the cycle of succ starting from the smallest neighbor
        int start = g.neighbors(v).front();
        auto next = [&](int u) {
            for (auto &[a, w] : succ[v])
                if (a == u) return w;
            fail("InternalError", "broken face structure");
        };
        int u = start;
        do {
            rot[v].push_back(u);
            u = next(u);
        } while (u != start && static_cast<int>(rot[v].size()) <= g.degree(v));
        if (static_cast<int>(rot[v].size()) != g.degree(v))
            fail("InternalError", "rotation cycle does not cover all neighbors");
    }
    return rot;
}

} // namespace detail

/// Planar embedding of g. Throws NotPlanar when no embedding exists.
/// Deterministic: identical inputs give identical rotation systems.
inline RotationSystem planar_embedding(const Graph &g) {
    int n = g.n();
    std::vector<std::vector<int>> rot(n);
    if (n >= 3)
        require(g.m() <= 3 * n - 6, "NotPlanar", "too many edges for a planar graph");

    for (const VertexSet &comp : connected_components(g, VertexSet::range(n))) {
        BlockCutTree bct = block_cut_tree(g, comp);
        for (const VertexSet &blk : bct.blocks) {
            if (blk.size() == 1) continue;
            if (blk.size() == 2) {
                int a = blk.items()[0], b = blk.items()[1];
                rot[a].push_back(b);
                rot[b].push_back(a);
                continue;
            }
            Subgraph s = induced_subgraph(g, blk);
            auto block_rot = detail::embed_block(s.g);
            require(block_rot.has_value(), "NotPlanar", "block has no planar embedding");
            for (int lv = 0; lv < s.g.n(); ++lv) {
                // rotate each block cycle to start at the smallest neighbor
                auto cyc = (*block_rot)[lv];
                auto mn = std::min_element(cyc.begin(), cyc.end());
                std::rotate(cyc.begin(), mn, cyc.end());
                for (int lu : cyc) rot[s.to_root[lv]].push_back(s.to_root[lu]);
            }
        }
    }

    RotationSystem rs;
    rs.rotation = rot;
    std::vector<int> fpc;
    rs.faces = detail::trace_faces(g, rot, &fpc);
    rs.outer_face = 0;
    // Euler check per component
    auto comps = connected_components(g, VertexSet::range(n));
    for (size_t c = 0; c < comps.size(); ++c) {
        int nc = comps[c].size();
        int mc = static_cast<int>(edges_inside(g, comps[c]).size());
        if (nc - mc + fpc[c] != 2)
            fail("InternalError", "embedding fails Euler formula");
    }
    return rs;
}

inline bool is_planar(const Graph &g) {
    if (g.n() >= 3 && g.m() > 3 * g.n() - 6) return false;
    try {
        planar_embedding(g);
        return true;
    } catch (const Error &e) {
        if (e.code() == "NotPlanar") return false;
        throw;
    }
}

/// Rigidity per the skeleton machinery: a simple cycle, or 3-vertex-connected
/// after suppressing maximal 2-paths, with no loops or parallels introduced.
struct RigidityReport {
    bool rigid = false;
    bool simple_cycle = false;
    Graph suppressed;                       // on anchor vertices, relabeled
    std::vector<int> anchor_of;             // suppressed id -> original id
    std::vector<std::vector<int>> two_paths; // maximal 2-paths (original ids)
    std::string reason;                      // for diagnostics when not rigid
};

inline RigidityReport is_rigid(const Graph &g) {
    require(g.n() > 0 && is_connected(g), "Disconnected", "rigidity needs a connected graph");
    RigidityReport rep;

    bool all_deg2 = true;
    for (int v = 0; v < g.n(); ++v)
        if (g.degree(v) != 2) { all_deg2 = false; break; }
    if (all_deg2) {
        rep.rigid = g.n() >= 3;
        rep.simple_cycle = rep.rigid;
        if (!rep.rigid) rep.reason = "degenerate";
        return rep;
    }

    // anchors keep their degree; walk 2-paths from each anchor half-edge
    std::vector<int> anchors;
    for (int v = 0; v < g.n(); ++v)
        if (g.degree(v) != 2) anchors.push_back(v);
    std::vector<int> sup_id(g.n(), -1);
    for (size_t i = 0; i < anchors.size(); ++i) sup_id[anchors[i]] = static_cast<int>(i);

    std::vector<std::pair<int, int>> sup_edges; // anchor pairs, may repeat
    EdgeSet walked;
    for (int a : anchors) {
        for (int w0 : g.neighbors(a)) {
            if (edge_in(walked, Edge(a, w0))) continue;
            std::vector<int> path{a};
            int prev = a, cur = w0;
            walked.push_back(Edge(a, w0));
            normalize(walked);
            while (g.degree(cur) == 2) {
                path.push_back(cur);
                int nxt = g.neighbors(cur)[0] == prev ? g.neighbors(cur)[1] : g.neighbors(cur)[0];
                walked.push_back(Edge(cur, nxt));
                normalize(walked);
                prev = cur;
                cur = nxt;
            }
            path.push_back(cur);
            rep.two_paths.push_back(path);
            sup_edges.emplace_back(a, cur);
        }
    }

    for (auto [a, b] : sup_edges)
        if (a == b) {
            rep.reason = "suppression creates a self-loop";
            return rep;
        }
    std::vector<Edge> norm;
    for (auto [a, b] : sup_edges) norm.emplace_back(sup_id[a], sup_id[b]);
    std::sort(norm.begin(), norm.end());
    for (size_t i = 1; i < norm.size(); ++i)
        if (norm[i] == norm[i - 1]) {
            rep.reason = "suppression creates parallel edges";
            return rep;
        }
    norm.erase(std::unique(norm.begin(), norm.end()), norm.end());
    rep.suppressed = Graph(static_cast<int>(anchors.size()), norm);
    rep.anchor_of = anchors;

    int ns = rep.suppressed.n();
    if (ns < 4) {
        rep.reason = "suppressed graph too small for 3-connectivity";
        return rep;
    }
    // brute-force 3-connectivity: no pair disconnects
    for (int x = 0; x < ns; ++x)
        for (int y = x + 1; y < ns; ++y) {
            VertexSet rest = VertexSet::range(ns);
            rest.erase(x);
            rest.erase(y);
            if (!is_connected(rep.suppressed, rest)) {
                rep.reason = "2-vertex cut in suppressed graph";
                return rep;
            }
        }
    rep.rigid = true;
    return rep;
}

/// Embedding of a rigid planar graph, canonical under reflection: the
/// lowest-id vertex's rotation starts at its lowest neighbor and the
/// orientation makes the following neighbor minimal.
inline RotationSystem unique_embedding(const Graph &k) {
    require(is_planar(k), "NotPlanar", "unique_embedding needs a planar graph");
    RigidityReport rr = is_rigid(k);
    require(rr.rigid, "NotRigid", "unique_embedding needs a rigid graph");
    RotationSystem rs = planar_embedding(k);

    int v0 = 0;
    while (v0 < k.n() && k.degree(v0) == 0) ++v0; // rigid => none, but be safe
    if (v0 >= k.n()) return rs;
    auto oriented = [&](std::vector<int> r) {
        auto mn = std::min_element(r.begin(), r.end());
        std::rotate(r.begin(), mn, r.end());
        return r;
    };
    std::vector<int> fwd = oriented(rs.rotation[v0]);
    std::vector<int> rev_r = rs.rotation[v0];
    std::reverse(rev_r.begin(), rev_r.end());
    std::vector<int> bwd = oriented(rev_r);
    bool reflect = bwd < fwd;
    if (reflect)
        for (auto &r : rs.rotation) std::reverse(r.begin(), r.end());
    for (int v = 0; v < k.n(); ++v)
        if (!rs.rotation[v].empty()) {
            auto mn = std::min_element(rs.rotation[v].begin(), rs.rotation[v].end());
            std::rotate(rs.rotation[v].begin(), mn, rs.rotation[v].end());
        }
    rs.faces = detail::trace_faces(k, rs.rotation);
    rs.outer_face = 0;
    return rs;
}

/// Is vs a simple cycle of g? (ordered check on the induced subgraph)
inline bool is_simple_cycle(const Graph &g, const VertexSet &vs) {
    if (vs.size() < 3) return false;
    Subgraph s = induced_subgraph(g, vs);
    for (int v = 0; v < s.g.n(); ++v)
        if (s.g.degree(v) != 2) return false;
    return is_connected(s.g);
}

/// Cycle order of a simple cycle through g (root ids), starting at the
/// smallest vertex, second vertex the smaller neighbor.
inline std::vector<int> cycle_order(const Graph &g, const VertexSet &x) {
    require(is_simple_cycle(g, x), "NotACycle", "vertex set is not a simple cycle");
    Subgraph s = induced_subgraph(g, x);
    std::vector<int> order{0};
    int prev = 0, cur = std::min(s.g.neighbors(0)[0], s.g.neighbors(0)[1]);
    while (cur != 0) {
        order.push_back(cur);
        int nxt = s.g.neighbors(cur)[0] == prev ? s.g.neighbors(cur)[1] : s.g.neighbors(cur)[0];
        prev = cur;
        cur = nxt;
    }
    for (int &v : order) v = s.to_root[v];
    return order;
}

/// Does g contain a simple cycle visiting exactly the vertices of vs? The
/// induced subgraph may have chords, so this is a small backtracking search;
/// bounding boxes in the pipeline always come with an explicit order, this
/// is for validating bare vertex sets.
inline std::optional<std::vector<int>> find_cycle_through(const Graph &g, const VertexSet &vs) {
    if (vs.size() < 3) return std::nullopt;
    Subgraph s = induced_subgraph(g, vs);
    int k = s.g.n();
    for (int v = 0; v < k; ++v)
        if (s.g.degree(v) < 2) return std::nullopt;
    std::vector<int> path{0};
    std::vector<char> used(k, 0);
    used[0] = 1;
    std::function<bool()> go = [&]() -> bool {
        if (static_cast<int>(path.size()) == k)
            return s.g.has_edge(path.back(), 0);
        for (int w : s.g.neighbors(path.back())) {
            if (used[w]) continue;
            used[w] = 1;
            path.push_back(w);
            if (go()) return true;
            path.pop_back();
            used[w] = 0;
        }
        return false;
    };
    if (!go()) return std::nullopt;
    for (int &v : path) v = s.to_root[v];
    return path;
}

/// Validate that `order` traces a simple cycle of g.
inline bool is_cycle_order(const Graph &g, const std::vector<int> &order) {
    if (order.size() < 3) return false;
    VertexSet vs(order);
    if (vs.size() != static_cast<int>(order.size())) return false;
    for (size_t i = 0; i < order.size(); ++i)
        if (!g.has_edge(order[i], order[(i + 1) % order.size()])) return false;
    return true;
}

/// Can g be drawn with cycle x crossing-free and everything on one side?
/// Realized with an apex vertex adjacent to all of x: the apex pins x onto
/// one face boundary, and planarity of the augmented graph is equivalent.
inline bool embeddable_inside_cycle_order(const Graph &g, const std::vector<int> &order) {
    if (order.empty()) return is_planar(g);
    require(is_cycle_order(g, order), "NotACycle", "bounding box order is not a cycle of g");
    int apex = g.n();
    EdgeSet extra;
    for (int v : order) extra.emplace_back(v, apex);
    return is_planar(g.with_extra_vertices(1, extra));
}

inline bool embeddable_inside_cycle(const Graph &g, const VertexSet &x) {
    if (x.empty()) return is_planar(g);
    auto cyc = find_cycle_through(g, x);
    require(cyc.has_value(), "NotACycle", "bounding box must be a simple cycle");
    return embeddable_inside_cycle_order(g, *cyc);
}

/// Apex-based witness used by property P2 checks: planarity of g[J] with all
/// of `boundary` on a common face. Returns the cyclic order of `boundary`
/// around the apex when it exists (the rotation at the apex).
inline std::optional<std::vector<int>> common_face_order(const Graph &g,
                                                         const VertexSet &boundary) {
    if (boundary.empty()) {
        if (!is_planar(g)) return std::nullopt;
        return std::vector<int>{};
    }
    int apex = g.n();
    EdgeSet extra;
    for (int v : boundary) extra.emplace_back(v, apex);
    Graph aug = g.with_extra_vertices(1, extra);
    if (!is_planar(aug)) return std::nullopt;
    RotationSystem rs = planar_embedding(aug);
    return rs.rotation[apex];
}

} // namespace planarize
