#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "planarize/flows.hpp"
#include "planarize/graph.hpp"
#include "planarize/rng.hpp"

namespace planarize {

enum class OracleMode { Exact, Heuristic };

inline const char *oracle_mode_name(OracleMode m) {
    return m == OracleMode::Exact ? "exact" : "heuristic";
}

/// Shared oracle settings. Exact mode enumerates and is only accepted below
/// the exhaustive thresholds; heuristic mode always answers but carries no
/// optimality claim. Reports record which mode produced each verdict.
struct OracleConfig {
    OracleMode mode = OracleMode::Exact;
    int exact_limit = 14;      // vertex-subset enumeration bound
    int exact_var_limit = 20;  // min-uncut variable bound
    uint64_t seed = 1;
    int restarts = 8;
};

struct SparsestCutResult {
    std::optional<Cut> cut;       // empty when no feasible (non-degenerate) cut
    double sparsity = 0.0;        // of the returned cut
    OracleMode mode = OracleMode::Exact;
};

namespace detail {

inline double cut_sparsity(const Graph &g, const std::vector<long long> &w, uint64_t mask_lo,
                           uint64_t /*unused*/, const std::vector<char> &in_a,
                           long long total_w) {
    (void)mask_lo;
    long long wa = 0;
    for (int v = 0; v < g.n(); ++v)
        if (in_a[v]) wa += w[v];
    long long mn = std::min(wa, total_w - wa);
    if (mn <= 0) return -1.0;
    long long cut = 0;
    for (const Edge &e : g.edges())
        if (in_a[e.u] != in_a[e.v]) ++cut;
    return static_cast<double>(cut) / static_cast<double>(mn);
}

} // namespace detail

/// Non-uniform sparsest cut with vertex weights: minimize
/// |E(A,B)| / min(W(A), W(B)). Cuts with a zero-weight side are infeasible
/// by definition; when no feasible cut exists the result has no cut.
inline SparsestCutResult sparsest_cut(const Graph &g, const std::vector<long long> &weights,
                                      const OracleConfig &cfg) {
    require(static_cast<int>(weights.size()) == g.n(), "OutOfRange", "weight size mismatch");
    long long total = 0;
    for (long long w : weights) {
        require(w >= 0, "OutOfRange", "negative vertex weight");
        total += w;
    }
    require(total > 0, "ZeroWeight", "total vertex weight must be positive");

    SparsestCutResult res;
    res.mode = cfg.mode;
    int n = g.n();
    auto consider = [&](const std::vector<char> &in_a) {
        double s = detail::cut_sparsity(g, weights, 0, 0, in_a, total);
        if (s < 0) return;
        if (!res.cut || s < res.sparsity - 1e-12) {
            Cut c;
            for (int v = 0; v < n; ++v) (in_a[v] ? c.side_a : c.side_b).insert(v);
            c.cut_edges = edges_between(g, c.side_a, c.side_b);
            c.value = static_cast<long long>(c.cut_edges.size());
            res.cut = std::move(c);
            res.sparsity = s;
        }
    };

    if (cfg.mode == OracleMode::Exact) {
        require(n <= cfg.exact_limit, "TooLargeForExact", "instance above exhaustive threshold");
        std::vector<char> in_a(n, 0);
        for (uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
            for (int v = 0; v < n; ++v) in_a[v] = (mask >> v) & 1;
            consider(in_a);
        }
        return res;
    }

    // heuristic: BFS sweeps from weighted seeds, s-t min cuts, then local moves
    std::vector<int> seeds;
    for (int v = 0; v < n && static_cast<int>(seeds.size()) < 24; ++v)
        if (weights[v] > 0) seeds.push_back(v);
    for (int s : seeds) {
        std::vector<int> order, dist(n, -1);
        order.push_back(s);
        dist[s] = 0;
        for (size_t qi = 0; qi < order.size(); ++qi)
            for (int w : g.neighbors(order[qi]))
                if (dist[w] == -1) {
                    dist[w] = dist[order[qi]] + 1;
                    order.push_back(w);
                }
        std::vector<char> in_a(n, 0);
        for (size_t k = 0; k + 1 < order.size(); ++k) {
            in_a[order[k]] = 1;
            consider(in_a);
        }
        // min cut to the farthest weighted vertex
        int t = -1;
        for (int v : order)
            if (weights[v] > 0 && v != s) t = v;
        if (t >= 0) {
            Cut c = min_cut(g, s, t);
            std::vector<char> side(n, 0);
            for (int v : c.side_a) side[v] = 1;
            consider(side);
        }
    }
    if (res.cut) {
        // single-vertex improvement sweeps
        std::vector<char> in_a(n, 0);
        for (int v : res.cut->side_a) in_a[v] = 1;
        bool improved = true;
        int rounds = 0;
        while (improved && rounds++ < 20) {
            improved = false;
            for (int v = 0; v < n; ++v) {
                in_a[v] ^= 1;
                double before = res.sparsity;
                consider(in_a);
                if (res.sparsity < before - 1e-12) improved = true;
                else in_a[v] ^= 1;
            }
        }
    }
    return res;
}

/// Balanced cut: both sides at least ceil(eps * n) vertices, infinite-weight
/// edges never cut. Exact mode enumerates; heuristic mode contracts the
/// infinite edges and runs seeded local search with restarts.
inline Cut balanced_cut(const Graph &g, const EdgeSet &infinite_edges, double eps,
                        const OracleConfig &cfg) {
    int n = g.n();
    require(n >= 2, "OutOfRange", "balanced cut needs >= 2 vertices");
    long long need = std::max<long long>(1, static_cast<long long>(std::ceil(eps * n)));

    // contract infinite-edge components
    std::vector<int> comp(n, -1);
    {
        Graph inf_graph(n, infinite_edges);
        auto comps = connected_components(inf_graph, VertexSet::range(n));
        for (size_t c = 0; c < comps.size(); ++c)
            for (int v : comps[c]) comp[v] = static_cast<int>(c);
    }
    int nc = 1 + *std::max_element(comp.begin(), comp.end());
    std::vector<long long> size_of(nc, 0);
    for (int v = 0; v < n; ++v) ++size_of[comp[v]];
    for (int c = 0; c < nc; ++c)
        require(size_of[c] <= n - need, "Infeasible",
                "infinite-edge component too large for any balanced cut");

    auto evaluate = [&](const std::vector<char> &side) -> std::optional<Cut> {
        long long na = 0;
        for (int c = 0; c < nc; ++c)
            if (side[c]) na += size_of[c];
        if (na < need || n - na < need) return std::nullopt;
        Cut cut;
        for (int v = 0; v < n; ++v) (side[comp[v]] ? cut.side_a : cut.side_b).insert(v);
        cut.cut_edges = edges_between(g, cut.side_a, cut.side_b);
        cut.value = static_cast<long long>(cut.cut_edges.size());
        return cut;
    };

    std::optional<Cut> best;
    auto keep_best = [&](std::optional<Cut> c) {
        if (c && (!best || c->value < best->value)) best = std::move(c);
    };

    if (cfg.mode == OracleMode::Exact) {
        require(nc <= cfg.exact_limit, "TooLargeForExact", "instance above exhaustive threshold");
        std::vector<char> side(nc, 0);
        for (uint64_t mask = 1; mask + 1 < (1ULL << nc); ++mask) {
            for (int c = 0; c < nc; ++c) side[c] = (mask >> c) & 1;
            keep_best(evaluate(side));
        }
        require(best.has_value(), "Infeasible", "no balanced cut satisfies the constraints");
        return *best;
    }

    // heuristic: seeded growth + single-supernode moves
    Rng rng(cfg.seed);
    Graph cg = [&] {
        EdgeSet es;
        for (const Edge &e : g.edges()) {
            int a = comp[e.u], b = comp[e.v];
            if (a != b) es.emplace_back(a, b);
        }
        normalize(es);
        return Graph(nc, es);
    }();
    for (int r = 0; r < cfg.restarts; ++r) {
        // BFS-grow side A from a random supernode until balanced
        int s = rng.next_int(nc);
        std::vector<char> side(nc, 0);
        std::vector<int> order{s};
        side[s] = 1;
        long long na = size_of[s];
        for (size_t qi = 0; qi < order.size() && na < (n + 1) / 2; ++qi)
            for (int w : cg.neighbors(order[qi])) {
                if (side[w] || na >= (n + 1) / 2) continue;
                side[w] = 1;
                na += size_of[w];
                order.push_back(w);
            }
        // greedily add isolated supernodes if still unbalanced
        for (int c = 0; c < nc && na < need; ++c)
            if (!side[c]) {
                side[c] = 1;
                na += size_of[c];
            }
        keep_best(evaluate(side));
        // local moves
        for (int round = 0; round < 40; ++round) {
            bool moved = false;
            for (int c = 0; c < nc; ++c) {
                side[c] ^= 1;
                auto cand = evaluate(side);
                if (cand && (!best || cand->value < best->value)) {
                    best = std::move(cand);
                    moved = true;
                } else {
                    side[c] ^= 1;
                }
            }
            if (!moved) break;
        }
    }
    require(best.has_value(), "Infeasible", "no balanced cut found");
    return *best;
}

/// Boolean min-uncut: variables, disequality constraints with weights
/// (weight < 0 means infinite). Returns an assignment satisfying every
/// infinite constraint; minimizes (exact) or locally searches (heuristic)
/// the total weight of violated finite constraints.
struct MinUncutConstraint {
    int a = 0, b = 0;
    long long w = 1; // < 0 encodes infinity
};

struct MinUncutResult {
    std::vector<char> assignment;
    long long cost = 0;
    OracleMode mode = OracleMode::Exact;
};

inline MinUncutResult min_uncut(int n_vars, const std::vector<MinUncutConstraint> &constraints,
                                const OracleConfig &cfg) {
    for (const auto &c : constraints) {
        require(c.a >= 0 && c.a < n_vars && c.b >= 0 && c.b < n_vars, "OutOfRange",
                "constraint variable out of range");
        require(c.a != c.b || c.w >= 0, "InfeasibleInfinite",
                "infinite disequality on a single variable");
    }
    // 2-color the infinite constraint graph
    std::vector<std::vector<int>> inf_adj(n_vars);
    for (size_t i = 0; i < constraints.size(); ++i)
        if (constraints[i].w < 0) {
            inf_adj[constraints[i].a].push_back(constraints[i].b);
            inf_adj[constraints[i].b].push_back(constraints[i].a);
        }
    std::vector<int> comp(n_vars, -1);
    std::vector<char> color(n_vars, 0);
    int nc = 0;
    for (int s = 0; s < n_vars; ++s) {
        if (comp[s] != -1) continue;
        comp[s] = nc;
        color[s] = 0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : inf_adj[v]) {
                if (comp[w] == -1) {
                    comp[w] = nc;
                    color[w] = !color[v];
                    stack.push_back(w);
                } else if (color[w] == color[v]) {
                    fail("InfeasibleInfinite", "odd cycle of infinite constraints");
                }
            }
        }
        ++nc;
    }

    auto cost_of = [&](const std::vector<char> &flip) {
        long long cost = 0;
        for (const auto &c : constraints) {
            if (c.w < 0) continue;
            char va = color[c.a] ^ flip[comp[c.a]];
            char vb = color[c.b] ^ flip[comp[c.b]];
            if (va == vb) cost += c.w;
        }
        return cost;
    };

    MinUncutResult res;
    res.mode = cfg.mode;
    std::vector<char> best_flip(nc, 0);
    long long best = cost_of(best_flip);

    if (cfg.mode == OracleMode::Exact) {
        require(nc <= cfg.exact_var_limit, "TooLargeForExact",
                "instance above exhaustive threshold");
        std::vector<char> flip(nc, 0);
        for (uint64_t mask = 0; mask < (1ULL << nc); ++mask) {
            for (int c = 0; c < nc; ++c) flip[c] = (mask >> c) & 1;
            long long cost = cost_of(flip);
            if (cost < best) {
                best = cost;
                best_flip = flip;
            }
        }
    } else {
        Rng rng(cfg.seed);
        for (int r = 0; r < cfg.restarts; ++r) {
            std::vector<char> flip(nc);
            for (int c = 0; c < nc; ++c) flip[c] = r == 0 ? 0 : rng.bernoulli(0.5);
            long long cost = cost_of(flip);
            bool improved = true;
            while (improved) {
                improved = false;
                for (int c = 0; c < nc; ++c) {
                    flip[c] ^= 1;
                    long long cand = cost_of(flip);
                    if (cand < cost) {
                        cost = cand;
                        improved = true;
                    } else {
                        flip[c] ^= 1;
                    }
                }
            }
            if (cost < best) {
                best = cost;
                best_flip = flip;
            }
        }
    }

    res.cost = best;
    res.assignment.resize(n_vars);
    for (int v = 0; v < n_vars; ++v) res.assignment[v] = color[v] ^ best_flip[comp[v]];
    return res;
}

} // namespace planarize
