#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "planarize/errors.hpp"

namespace planarize {

/// Undirected edge, normalized so u < v. Edge sets are kept sorted, which
/// makes every derived artifact deterministic.
struct Edge {
    int u = -1, v = -1;
    Edge() = default;
    Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}
    friend bool operator==(const Edge &a, const Edge &b) = default;
    friend auto operator<=>(const Edge &a, const Edge &b) = default;
    int other(int w) const { return w == u ? v : u; }
    bool has(int w) const { return w == u || w == v; }
};

using EdgeSet = std::vector<Edge>; // sorted, unique

inline void normalize(EdgeSet &es) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
}

inline bool edge_in(const EdgeSet &es, const Edge &e) {
    return std::binary_search(es.begin(), es.end(), e);
}

inline EdgeSet edge_union(const EdgeSet &a, const EdgeSet &b) {
    EdgeSet r;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline EdgeSet edge_minus(const EdgeSet &a, const EdgeSet &b) {
    EdgeSet r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline EdgeSet edge_intersect(const EdgeSet &a, const EdgeSet &b) {
    EdgeSet r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

/// Sorted set of vertex ids over some host graph.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(std::initializer_list<int> xs) : v_(xs) { canon(); }
    explicit VertexSet(std::vector<int> xs) : v_(std::move(xs)) { canon(); }

    static VertexSet range(int n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return VertexSet(std::move(v));
    }

    bool contains(int x) const { return std::binary_search(v_.begin(), v_.end(), x); }
    int size() const { return static_cast<int>(v_.size()); }
    bool empty() const { return v_.empty(); }
    void insert(int x) {
        auto it = std::lower_bound(v_.begin(), v_.end(), x);
        if (it == v_.end() || *it != x) v_.insert(it, x);
    }
    void erase(int x) {
        auto it = std::lower_bound(v_.begin(), v_.end(), x);
        if (it != v_.end() && *it == x) v_.erase(it);
    }
    const std::vector<int> &items() const { return v_; }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }
    friend bool operator==(const VertexSet &, const VertexSet &) = default;

    VertexSet set_union(const VertexSet &o) const {
        std::vector<int> r;
        std::set_union(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(), std::back_inserter(r));
        return VertexSet::sorted(std::move(r));
    }
    VertexSet set_minus(const VertexSet &o) const {
        std::vector<int> r;
        std::set_difference(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(), std::back_inserter(r));
        return VertexSet::sorted(std::move(r));
    }
    VertexSet set_intersect(const VertexSet &o) const {
        std::vector<int> r;
        std::set_intersection(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(), std::back_inserter(r));
        return VertexSet::sorted(std::move(r));
    }
    bool intersects(const VertexSet &o) const {
        auto a = v_.begin();
        auto b = o.v_.begin();
        while (a != v_.end() && b != o.v_.end()) {
            if (*a == *b) return true;
            if (*a < *b) ++a; else ++b;
        }
        return false;
    }
    bool subset_of(const VertexSet &o) const {
        return std::includes(o.v_.begin(), o.v_.end(), v_.begin(), v_.end());
    }

private:
    static VertexSet sorted(std::vector<int> v) {
        VertexSet s;
        s.v_ = std::move(v);
        return s;
    }
    void canon() {
        std::sort(v_.begin(), v_.end());
        v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
    }
    std::vector<int> v_;
};

/// Simple undirected graph with dense vertex ids 0..n-1. Immutable after
/// construction; d_max is computed once. No self-loops or parallel edges.
class Graph {
public:
    Graph() = default;

    Graph(int n, EdgeSet edges) : n_(n), edges_(std::move(edges)) {
        require(n_ >= 0, "OutOfRange", "negative vertex count");
        std::sort(edges_.begin(), edges_.end());
        adj_.assign(n_, {});
        for (size_t i = 0; i < edges_.size(); ++i) {
            const Edge &e = edges_[i];
            require(e.u != e.v, "SelfLoop", "edge with equal endpoints");
            require(e.u >= 0 && e.v < n_, "OutOfRange", "edge endpoint outside [0,n)");
            if (i > 0)
                require(!(edges_[i] == edges_[i - 1]), "DuplicateEdge", "parallel edge");
            adj_[e.u].push_back(e.v);
            adj_[e.v].push_back(e.u);
        }
        for (auto &a : adj_) {
            std::sort(a.begin(), a.end());
            d_max_ = std::max(d_max_, static_cast<int>(a.size()));
        }
    }

    int n() const { return n_; }
    int m() const { return static_cast<int>(edges_.size()); }
    int d_max() const { return d_max_; }
    const EdgeSet &edges() const { return edges_; }
    const std::vector<int> &neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    bool has_edge(int u, int v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) return false;
        return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
    }

    Graph without_edges(const EdgeSet &removed) const {
        return Graph(n_, edge_minus(edges_, removed));
    }

    Graph with_extra_vertices(int extra, const EdgeSet &added) const {
        return Graph(n_ + extra, edge_union(edges_, added));
    }

private:
    int n_ = 0;
    EdgeSet edges_;
    std::vector<std::vector<int>> adj_;
    int d_max_ = 0;
};

inline Graph build_graph(int n, const std::vector<std::pair<int, int>> &pairs) {
    EdgeSet es;
    es.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        require(a != b, "SelfLoop", "edge with equal endpoints");
        es.emplace_back(a, b);
    }
    EdgeSet check = es;
    std::sort(check.begin(), check.end());
    for (size_t i = 1; i < check.size(); ++i)
        require(!(check[i] == check[i - 1]), "DuplicateEdge", "parallel edge in input");
    return Graph(n, std::move(es));
}

/// out(J), interface Gamma(J) and terminals T(J) for a vertex set J.
struct CutProfile {
    EdgeSet out;        // edges with exactly one endpoint in J
    VertexSet interface; // endpoints inside J
    VertexSet terminals; // endpoints outside J
};

inline CutProfile cut_profile(const Graph &g, const VertexSet &j) {
    for (int v : j)
        require(v >= 0 && v < g.n(), "OutOfRange", "set vertex outside graph");
    CutProfile p;
    for (const Edge &e : g.edges()) {
        bool iu = j.contains(e.u), iv = j.contains(e.v);
        if (iu == iv) continue;
        p.out.push_back(e);
        p.interface.insert(iu ? e.u : e.v);
        p.terminals.insert(iu ? e.v : e.u);
    }
    return p;
}

/// k x k grid with row-major labels: vertex (r,c) -> r*k + c. The first row
/// (r = 0) is the interface row used by the contraction gadgets.
inline Graph make_grid(int k) {
    require(k >= 1, "InvalidSize", "grid size must be >= 1");
    EdgeSet es;
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            if (c + 1 < k) es.emplace_back(r * k + c, r * k + c + 1);
            if (r + 1 < k) es.emplace_back(r * k + c, (r + 1) * k + c);
        }
    return Graph(k * k, std::move(es));
}

inline VertexSet grid_first_row(int k) {
    std::vector<int> row(k);
    std::iota(row.begin(), row.end(), 0);
    return VertexSet(std::move(row));
}

/// Connected components of the subgraph induced by `within`.
inline std::vector<VertexSet> connected_components(const Graph &g, const VertexSet &within) {
    for (int v : within)
        require(v >= 0 && v < g.n(), "OutOfRange", "vertex outside graph");
    std::vector<char> in(g.n(), 0), seen(g.n(), 0);
    for (int v : within) in[v] = 1;
    std::vector<VertexSet> comps;
    std::vector<int> stack;
    for (int s : within) {
        if (seen[s]) continue;
        std::vector<int> comp;
        stack.push_back(s);
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int w : g.neighbors(v))
                if (in[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        comps.emplace_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(), [](const VertexSet &a, const VertexSet &b) {
        return a.items() < b.items();
    });
    return comps;
}

inline bool is_connected(const Graph &g, const VertexSet &within) {
    if (within.empty()) return true;
    return connected_components(g, within).size() == 1;
}

inline bool is_connected(const Graph &g) {
    return is_connected(g, VertexSet::range(g.n()));
}

/// Shortest path between two vertices inside `allowed`; empty if none.
inline std::vector<int> bfs_path(const Graph &g, int s, int t,
                                 const std::vector<char> &allowed) {
    if (!allowed[s] || !allowed[t]) return {};
    std::vector<int> prev(g.n(), -2);
    std::vector<int> queue{s};
    prev[s] = -1;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        if (v == t) break;
        for (int w : g.neighbors(v))
            if (allowed[w] && prev[w] == -2) {
                prev[w] = v;
                queue.push_back(w);
            }
    }
    if (prev[t] == -2) return {};
    std::vector<int> path;
    for (int v = t; v != -1; v = prev[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

/// Block-cut tree of a connected induced subgraph: maximal 2-connected
/// components plus cut vertices, with the bipartite tree between them.
struct BlockCutTree {
    std::vector<VertexSet> blocks;
    VertexSet cut_vertices;
    // tree adjacency: block index -> cut vertices it contains
    std::vector<std::vector<int>> block_cuts;
    int root_block = -1; // optional, chosen by caller
};

inline BlockCutTree block_cut_tree(const Graph &g, const VertexSet &component) {
    require(is_connected(g, component), "Disconnected",
            "block_cut_tree needs a connected component");
    BlockCutTree t;
    if (component.empty()) return t;
    if (component.size() == 1) {
        t.blocks.push_back(component);
        t.block_cuts.emplace_back();
        return t;
    }
    std::vector<char> in(g.n(), 0);
    for (int v : component) in[v] = 1;

    std::vector<int> disc(g.n(), -1), low(g.n(), 0), parent(g.n(), -1);
    std::vector<char> is_cut(g.n(), 0);
    std::vector<Edge> estack;
    int timer = 0;
    std::vector<EdgeSet> block_edges;

    // iterative DFS with an explicit edge stack
    struct Frame { int v; size_t ni; };
    int root = component.items().front();
    std::vector<Frame> st;
    st.push_back({root, 0});
    disc[root] = low[root] = timer++;
    int root_children = 0;

    auto pop_block = [&](const Edge &until) {
        EdgeSet be;
        while (!estack.empty()) {
            Edge e = estack.back();
            estack.pop_back();
            be.push_back(e);
            if (e == until) break;
        }
        normalize(be);
        block_edges.push_back(std::move(be));
    };

    while (!st.empty()) {
        auto &[v, ni] = st.back();
        const auto &nb = g.neighbors(v);
        bool advanced = false;
        while (ni < nb.size()) {
            int w = nb[ni++];
            if (!in[w]) continue;
            if (disc[w] == -1) {
                parent[w] = v;
                if (v == root) ++root_children;
                estack.emplace_back(v, w);
                disc[w] = low[w] = timer++;
                st.push_back({w, 0});
                advanced = true;
                break;
            } else if (w != parent[v] && disc[w] < disc[v]) {
                estack.emplace_back(v, w);
                low[v] = std::min(low[v], disc[w]);
            }
        }
        if (advanced) continue;
        st.pop_back();
        if (!st.empty()) {
            int u = st.back().v;
            low[u] = std::min(low[u], low[v]);
            if (low[v] >= disc[u]) {
                if (u != root || root_children > 1) is_cut[u] = 1;
                pop_block(Edge(u, v));
            }
        }
    }

    for (auto &be : block_edges) {
        VertexSet vs;
        for (const Edge &e : be) {
            vs.insert(e.u);
            vs.insert(e.v);
        }
        t.blocks.push_back(std::move(vs));
    }
    std::sort(t.blocks.begin(), t.blocks.end(), [](const VertexSet &a, const VertexSet &b) {
        return a.items() < b.items();
    });
    for (int v : component)
        if (is_cut[v]) t.cut_vertices.insert(v);
    t.block_cuts.resize(t.blocks.size());
    for (size_t b = 0; b < t.blocks.size(); ++b)
        for (int v : t.blocks[b])
            if (t.cut_vertices.contains(v)) t.block_cuts[b].push_back(v);
    return t;
}

/// Induced subgraph with the map back to host-graph ids. Local ids follow
/// the sorted order of the host ids, so construction is deterministic.
struct Subgraph {
    Graph g;
    std::vector<int> to_root;            // local -> root
    std::vector<int> to_local;           // root -> local or -1

    int local(int root_id) const { return to_local[root_id]; }
    Edge root_edge(const Edge &local_e) const {
        return Edge(to_root[local_e.u], to_root[local_e.v]);
    }
    Edge local_edge(const Edge &root_e) const {
        return Edge(to_local[root_e.u], to_local[root_e.v]);
    }
    EdgeSet root_edges(const EdgeSet &local_es) const {
        EdgeSet r;
        r.reserve(local_es.size());
        for (const Edge &e : local_es) r.push_back(root_edge(e));
        normalize(r);
        return r;
    }
};

inline Subgraph induced_subgraph(const Graph &g, const VertexSet &vs) {
    Subgraph s;
    s.to_root = vs.items();
    s.to_local.assign(g.n(), -1);
    for (size_t i = 0; i < s.to_root.size(); ++i) s.to_local[s.to_root[i]] = static_cast<int>(i);
    EdgeSet es;
    for (const Edge &e : g.edges())
        if (s.to_local[e.u] >= 0 && s.to_local[e.v] >= 0)
            es.emplace_back(s.to_local[e.u], s.to_local[e.v]);
    s.g = Graph(vs.size(), std::move(es));
    return s;
}

/// Edges of g with both endpoints in vs (in host ids).
inline EdgeSet edges_inside(const Graph &g, const VertexSet &vs) {
    EdgeSet r;
    for (const Edge &e : g.edges())
        if (vs.contains(e.u) && vs.contains(e.v)) r.push_back(e);
    return r;
}

inline EdgeSet edges_between(const Graph &g, const VertexSet &a, const VertexSet &b) {
    EdgeSet r;
    for (const Edge &e : g.edges()) {
        bool au = a.contains(e.u), av = a.contains(e.v);
        bool bu = b.contains(e.u), bv = b.contains(e.v);
        if ((au && bv) || (av && bu)) r.push_back(e);
    }
    return r;
}

} // namespace planarize
