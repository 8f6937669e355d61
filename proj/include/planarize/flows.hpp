#pragma once

#include <algorithm>
#include <queue>
#include <vector>

#include "planarize/graph.hpp"

namespace planarize {

constexpr long long FLOW_INF = 1LL << 40;

/// Dinic max-flow on an explicit directed network. Unit and infinite
/// capacities are all the pipeline needs.
class Dinic {
public:
    struct Arc {
        int to;
        int rev;
        long long cap;
        long long orig;
    };

    explicit Dinic(int n) : arcs_(n) {}

    int add_node() {
        arcs_.emplace_back();
        return static_cast<int>(arcs_.size()) - 1;
    }

    /// Directed arc u->v. Returns index into arcs(u).
    int add_arc(int u, int v, long long cap) {
        arcs_[u].push_back({v, static_cast<int>(arcs_[v].size()), cap, cap});
        arcs_[v].push_back({u, static_cast<int>(arcs_[u].size()) - 1, 0, 0});
        return static_cast<int>(arcs_[u].size()) - 1;
    }

    /// Undirected edge with capacity cap in both directions.
    void add_undirected(int u, int v, long long cap) {
        arcs_[u].push_back({v, static_cast<int>(arcs_[v].size()), cap, cap});
        arcs_[v].push_back({u, static_cast<int>(arcs_[u].size()) - 1, cap, cap});
    }

    long long max_flow(int s, int t) {
        long long flow = 0;
        while (bfs(s, t)) {
            it_.assign(arcs_.size(), 0);
            while (long long pushed = dfs(s, t, FLOW_INF)) flow += pushed;
        }
        return flow;
    }

    /// Vertices reachable from s in the residual graph (call after max_flow).
    std::vector<char> residual_reachable(int s) const {
        std::vector<char> seen(arcs_.size(), 0);
        std::vector<int> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const Arc &a : arcs_[v])
                if (a.cap > 0 && !seen[a.to]) {
                    seen[a.to] = 1;
                    stack.push_back(a.to);
                }
        }
        return seen;
    }

    long long flow_on(int u, int arc_index) const {
        const Arc &a = arcs_[u][arc_index];
        return a.orig - a.cap;
    }

    const std::vector<Arc> &arcs(int u) const { return arcs_[u]; }
    int size() const { return static_cast<int>(arcs_.size()); }

    /// Decompose an integral flow into unit s-t paths of network nodes.
    /// Destructive on the recorded flow amounts.
    std::vector<std::vector<int>> extract_unit_paths(int s, int t) {
        std::vector<std::vector<int>> paths;
        std::vector<long long> residual_flow;
        // snapshot of per-arc flow we can consume
        std::vector<std::vector<long long>> f(arcs_.size());
        for (size_t u = 0; u < arcs_.size(); ++u) {
            f[u].resize(arcs_[u].size());
            for (size_t i = 0; i < arcs_[u].size(); ++i)
                f[u][i] = std::max<long long>(0, arcs_[u][i].orig - arcs_[u][i].cap);
        }
        while (true) {
            std::vector<int> path{s};
            int v = s;
            bool dead = false;
            std::vector<std::pair<int, int>> used;
            while (v != t) {
                bool moved = false;
                for (size_t i = 0; i < arcs_[v].size(); ++i)
                    if (f[v][i] > 0) {
                        f[v][i] -= 1;
                        used.emplace_back(v, static_cast<int>(i));
                        v = arcs_[v][i].to;
                        path.push_back(v);
                        moved = true;
                        break;
                    }
                if (!moved || path.size() > 4 * arcs_.size()) {
                    dead = true;
                    break;
                }
            }
            if (dead) break;
            paths.push_back(std::move(path));
        }
        return paths;
    }

private:
    bool bfs(int s, int t) {
        level_.assign(arcs_.size(), -1);
        std::queue<int> q;
        q.push(s);
        level_[s] = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (const Arc &a : arcs_[v])
                if (a.cap > 0 && level_[a.to] == -1) {
                    level_[a.to] = level_[v] + 1;
                    q.push(a.to);
                }
        }
        return level_[t] >= 0;
    }

    long long dfs(int v, int t, long long f) {
        if (v == t) return f;
        for (size_t &i = it_[v]; i < arcs_[v].size(); ++i) {
            Arc &a = arcs_[v][i];
            if (a.cap > 0 && level_[a.to] == level_[v] + 1) {
                long long d = dfs(a.to, t, std::min(f, a.cap));
                if (d > 0) {
                    a.cap -= d;
                    arcs_[a.to][a.rev].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }

    std::vector<std::vector<Arc>> arcs_;
    std::vector<int> level_;
    std::vector<size_t> it_;
};

/// A certified cut: partition (A,B), the crossing edges and their count.
struct Cut {
    VertexSet side_a, side_b;
    EdgeSet cut_edges;
    long long value = 0;
};

/// Minimum edge cut separating supernode S from supernode T in an
/// unweighted graph. The returned value is certified equal to the max-flow.
inline Cut min_cut(const Graph &g, const VertexSet &src, const VertexSet &dst) {
    require(!src.empty() && !dst.empty(), "SameTerminal", "empty terminal side");
    require(!src.intersects(dst), "SameTerminal", "source and sink overlap");
    // map: 0 = s, 1 = t, others shifted
    std::vector<int> id(g.n(), -1);
    int next = 2;
    for (int v = 0; v < g.n(); ++v) {
        if (src.contains(v)) id[v] = 0;
        else if (dst.contains(v)) id[v] = 1;
        else id[v] = next++;
    }
    Dinic net(next);
    for (const Edge &e : g.edges()) {
        int a = id[e.u], b = id[e.v];
        if (a == b) continue;
        net.add_undirected(a, b, 1);
    }
    long long f = net.max_flow(0, 1);
    std::vector<char> reach = net.residual_reachable(0);
    Cut cut;
    for (int v = 0; v < g.n(); ++v)
        (reach[id[v]] ? cut.side_a : cut.side_b).insert(v);
    cut.cut_edges = edges_between(g, cut.side_a, cut.side_b);
    cut.value = static_cast<long long>(cut.cut_edges.size());
    if (cut.value != f)
        fail("InternalError", "min cut does not certify max flow");
    return cut;
}

inline Cut min_cut(const Graph &g, int s, int t) {
    require(s != t, "SameTerminal", "s and t must differ");
    return min_cut(g, VertexSet{s}, VertexSet{t});
}

/// Grid family over a host graph: disjoint vertex sets, each inducing a
/// k x k grid whose first row is matched to outside terminals.
struct GridFamily {
    std::vector<VertexSet> grids;

    bool member(int v) const {
        for (const auto &z : grids)
            if (z.contains(v)) return true;
        return false;
    }
    /// All edges inside grids (host ids).
    EdgeSet grid_edges(const Graph &g) const {
        EdgeSet r;
        for (const auto &z : grids) {
            EdgeSet in = edges_inside(g, z);
            r.insert(r.end(), in.begin(), in.end());
        }
        normalize(r);
        return r;
    }
    bool canonical(const VertexSet &j) const {
        for (const auto &z : grids) {
            bool any = z.intersects(j);
            if (any && !z.subset_of(j)) return false;
        }
        return true;
    }
    /// Restrict to grids fully inside `host_vertices`. Grids partially
    /// inside violate canonicality and are rejected by the V-checks instead.
    GridFamily restrict_to(const VertexSet &host_vertices) const {
        GridFamily f;
        for (const auto &z : grids)
            if (z.subset_of(host_vertices)) f.grids.push_back(z);
        return f;
    }
};

/// Minimum s-t cut that is canonical for the grid family: no grid is split.
/// A true minimum cut never splits a grid with the first-row matching
/// structure; the repair loop below restores canonicality if the solver
/// returns a degenerate tie, moving each split grid to the side holding the
/// majority of its interface row.
inline Cut canonical_min_cut(const Graph &g, const GridFamily &zs, const VertexSet &src,
                             const VertexSet &dst) {
    // supernodes may swallow whole grids; they must not cut into one
    for (const auto &z : zs.grids) {
        bool src_in = z.intersects(src), dst_in = z.intersects(dst);
        require(!(src_in && !z.subset_of(src)), "TerminalInGrid",
                "source cuts into a grid");
        require(!(dst_in && !z.subset_of(dst)), "TerminalInGrid", "sink cuts into a grid");
        require(!(src_in && dst_in), "TerminalInGrid", "grid spans both terminals");
    }
    Cut cut = min_cut(g, src, dst);
    long long base = cut.value;
    bool moved = true;
    while (moved) {
        moved = false;
        for (const auto &z : zs.grids) {
            VertexSet in_a = z.set_intersect(cut.side_a);
            if (in_a.empty() || in_a.size() == z.size()) continue;
            CutProfile cp = cut_profile(g, z);
            VertexSet gamma_a = cp.interface.set_intersect(cut.side_a);
            VertexSet gamma_b = cp.interface.set_minus(gamma_a);
            if (gamma_a.size() <= gamma_b.size()) {
                cut.side_a = cut.side_a.set_minus(z);
                cut.side_b = cut.side_b.set_union(z);
            } else {
                cut.side_b = cut.side_b.set_minus(z);
                cut.side_a = cut.side_a.set_union(z);
            }
            moved = true;
        }
    }
    cut.cut_edges = edges_between(g, cut.side_a, cut.side_b);
    cut.value = static_cast<long long>(cut.cut_edges.size());
    if (cut.value > base)
        fail("InternalError", "grid uncrossing increased the cut");
    if (!zs.canonical(cut.side_a))
        fail("InternalError", "canonical min cut failed to uncross grids");
    return cut;
}

/// Maximum set of vertex-disjoint paths from A to B (standard node
/// splitting). Vertices in both sets count as zero-length paths. Returns the
/// paths as vertex sequences.
inline std::vector<std::vector<int>> vertex_disjoint_paths(const Graph &g, const VertexSet &a,
                                                           const VertexSet &b) {
    int n = g.n();
    // nodes: 2v = v_in, 2v+1 = v_out, 2n = s, 2n+1 = t
    Dinic net(2 * n + 2);
    int s = 2 * n, t = 2 * n + 1;
    for (int v = 0; v < n; ++v) net.add_arc(2 * v, 2 * v + 1, 1);
    for (const Edge &e : g.edges()) {
        net.add_arc(2 * e.u + 1, 2 * e.v, 1);
        net.add_arc(2 * e.v + 1, 2 * e.u, 1);
    }
    for (int v : a) net.add_arc(s, 2 * v, 1);
    for (int v : b) net.add_arc(2 * v + 1, t, 1);
    net.max_flow(s, t);
    auto raw = net.extract_unit_paths(s, t);
    std::vector<std::vector<int>> paths;
    for (auto &p : raw) {
        std::vector<int> path;
        for (int node : p)
            if (node < 2 * n && node % 2 == 0) path.push_back(node / 2);
        paths.push_back(std::move(path));
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

} // namespace planarize
