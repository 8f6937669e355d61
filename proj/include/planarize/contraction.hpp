#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "planarize/graph.hpp"
#include "planarize/planarity.hpp"
#include "planarize/well_linked.hpp"

namespace planarize {

/// One cluster of the contraction partition. `core` and `pendants` witness
/// the C2 structure: for |interface| > 2 the interface lives inside a
/// 2-connected core, and each pendant hangs off a single separator vertex.
struct Cluster {
    VertexSet vertices;
    VertexSet interface;
    int type = 1; // 1: interface-bearing root, 2: |interface| <= 2
    VertexSet core;
    std::vector<std::pair<int, VertexSet>> pendants; // (separator, pendant set)
    std::vector<int> boundary_order;                 // interface in witness face order
};

struct ClusterPartition {
    VertexSet s;
    std::vector<Cluster> clusters;
    std::vector<std::vector<int>> component_clusters; // per component of G[S]
    std::vector<VertexSet> component_interfaces;      // Gamma_i per component
    double alpha_star = 0.0;
};

/// Contracted graph: each cluster replaced by its grid gadget. Vertices of
/// the host graph keep identity through `to_root` (grid vertices map to -1).
struct ContractedGraph {
    Graph h;
    std::vector<int> to_root;    // h vertex -> root vertex or -1
    std::vector<int> root_to_h;  // root vertex -> h vertex or -1
    GridFamily zs;               // gadget interiors, h coords
    std::vector<int> grid_cluster; // grid index -> cluster index
    std::vector<EdgeSet> matchings; // per grid, h coords
    VertexSet s_root;            // the contracted set, root coords
    ClusterPartition partition;
};

namespace detail {

// the Appendix-E marking pass over one block-cut tree
struct MarkedTree {
    // nodes: 0..B-1 blocks, B..B+C-1 cut vertices
    int n_blocks = 0;
    std::vector<int> cut_ids;                 // cut-node index -> vertex id
    std::vector<std::vector<int>> adj;        // tree adjacency
    std::vector<int> parent;
    std::vector<char> marked;
    int root = 0;
};

inline MarkedTree build_marked_tree(const Graph &g, const BlockCutTree &bct,
                                    const VertexSet &gamma) {
    MarkedTree t;
    t.n_blocks = static_cast<int>(bct.blocks.size());
    t.cut_ids = bct.cut_vertices.items();
    int nc = static_cast<int>(t.cut_ids.size());
    t.adj.assign(t.n_blocks + nc, {});
    auto cut_node = [&](int v) {
        int idx = static_cast<int>(std::lower_bound(t.cut_ids.begin(), t.cut_ids.end(), v) -
                                   t.cut_ids.begin());
        return t.n_blocks + idx;
    };
    for (int b = 0; b < t.n_blocks; ++b)
        for (int v : bct.block_cuts[b]) {
            t.adj[b].push_back(cut_node(v));
            t.adj[cut_node(v)].push_back(b);
        }

    // root: a cut vertex in gamma if one exists, else a block meeting gamma,
    // else node 0
    t.root = 0;
    bool found = false;
    for (int i = 0; i < nc && !found; ++i)
        if (gamma.contains(t.cut_ids[i])) {
            t.root = t.n_blocks + i;
            found = true;
        }
    if (!found)
        for (int b = 0; b < t.n_blocks && !found; ++b)
            if (bct.blocks[b].intersects(gamma)) {
                t.root = b;
                found = true;
            }

    // parents via BFS
    int total = t.n_blocks + nc;
    t.parent.assign(total, -2);
    std::vector<int> order{t.root};
    t.parent[t.root] = -1;
    for (size_t qi = 0; qi < order.size(); ++qi)
        for (int w : t.adj[order[qi]])
            if (t.parent[w] == -2) {
                t.parent[w] = order[qi];
                order.push_back(w);
            }

    // initial marks: blocks meeting gamma (a cut vertex in gamma marks all
    // its blocks through membership)
    t.marked.assign(total, 0);
    for (int b = 0; b < t.n_blocks; ++b)
        if (bct.blocks[b].intersects(gamma)) t.marked[b] = 1;

    // bottom-up: mark nodes with two marked-subtree children
    std::vector<char> subtree_marked(total, 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int x = *it;
        int marked_children = 0;
        for (int y : t.adj[x])
            if (y != t.parent[x] && subtree_marked[y]) ++marked_children;
        if (marked_children >= 2) t.marked[x] = 1;
        subtree_marked[x] = t.marked[x];
        for (int y : t.adj[x])
            if (y != t.parent[x] && subtree_marked[y]) subtree_marked[x] = 1;
    }
    return t;
}

} // namespace detail

/// The contraction partition of S (Appendix E): well-linked decomposition of
/// each component of G[S], then a block-cut-tree marking pass that carves
/// each piece into clusters satisfying C1-C5.
inline ClusterPartition partition_cluster_set(const Graph &g, const VertexSet &s,
                                              double alpha_star, const OracleConfig &cfg) {
    require(check_P1(g, s), "PreconditionViolated", "S lacks P1");
    require(check_P2(g, s).ok, "PreconditionViolated", "S lacks P2");

    ClusterPartition part;
    part.s = s;
    part.alpha_star = alpha_star;

    for (const VertexSet &comp : connected_components(g, s)) {
        std::vector<int> cluster_ids;
        VertexSet gamma_i = cut_profile(g, comp).interface;
        DecomposeFlags flags;
        flags.p1 = true;
        flags.p2 = true;
        auto dec = well_linked_decompose(g, comp, GridFamily{}, flags, alpha_star, cfg);

        for (const VertexSet &piece : dec.pieces) {
            VertexSet gamma_piece = cut_profile(g, piece).interface;
            BlockCutTree bct = block_cut_tree(g, piece);
            detail::MarkedTree mt = detail::build_marked_tree(g, bct, gamma_piece);
            int total = static_cast<int>(mt.adj.size());

            // forest after removing edges around marked nodes
            std::vector<char> subtree_marked(total, 0);
            {
                // recompute subtree flags for edge removal decisions
                std::vector<int> order{mt.root};
                for (size_t qi = 0; qi < order.size(); ++qi)
                    for (int w : mt.adj[order[qi]])
                        if (w != mt.parent[order[qi]]) order.push_back(w);
                for (auto it = order.rbegin(); it != order.rend(); ++it) {
                    int x = *it;
                    subtree_marked[x] = mt.marked[x];
                    for (int y : mt.adj[x])
                        if (y != mt.parent[x] && subtree_marked[y]) subtree_marked[x] = 1;
                }
            }
            std::vector<std::vector<int>> fadj(total);
            for (int x = 0; x < total; ++x)
                for (int y : mt.adj[x]) {
                    if (mt.parent[y] != x) continue; // treat each tree edge once, x = parent
                    bool remove = mt.marked[y] || (mt.marked[x] && subtree_marked[y]);
                    if (!remove) {
                        fadj[x].push_back(y);
                        fadj[y].push_back(x);
                    }
                }

            // forest components rooted at their shallowest node
            std::vector<int> forest_comp(total, -1);
            std::vector<int> forest_root;
            for (int x = 0; x < total; ++x) {
                if (forest_comp[x] != -1) continue;
                int id = static_cast<int>(forest_root.size());
                std::vector<int> stack{x};
                forest_comp[x] = id;
                int root = x;
                while (!stack.empty()) {
                    int v = stack.back();
                    stack.pop_back();
                    // the shallowest node of the component is its root
                    if (mt.parent[v] == -1 ||
                        (mt.parent[v] >= 0 && forest_comp[mt.parent[v]] != id))
                        root = v;
                    for (int w : fadj[v])
                        if (forest_comp[w] == -1) {
                            forest_comp[w] = id;
                            stack.push_back(w);
                        }
                }
                forest_root.push_back(root);
            }

            for (size_t fc = 0; fc < forest_root.size(); ++fc) {
                // gather blocks of this tree
                VertexSet x_vertices;
                bool has_block = false;
                for (int node = 0; node < total; ++node) {
                    if (forest_comp[node] != static_cast<int>(fc)) continue;
                    if (node < mt.n_blocks) {
                        has_block = true;
                        x_vertices = x_vertices.set_union(bct.blocks[node]);
                    }
                }
                if (!has_block) continue; // trivial tree: a lone cut vertex

                Cluster cl;
                cl.vertices = x_vertices;
                cl.interface = cut_profile(g, x_vertices).interface;
                int root = forest_root[fc];
                cl.type = mt.marked[root] ? 1 : 2;

                // C2 witness: core = root block (or the root cut vertex),
                // pendants = child subtrees inside this tree
                if (root < mt.n_blocks)
                    cl.core = bct.blocks[root];
                else
                    cl.core = VertexSet{mt.cut_ids[root - mt.n_blocks]};
                for (int y : fadj[root]) {
                    if (y == mt.parent[root]) continue;
                    // child subtree inside the forest component
                    VertexSet sub;
                    std::vector<int> stack{y};
                    std::vector<char> seen(total, 0);
                    seen[y] = 1;
                    seen[root] = 1;
                    while (!stack.empty()) {
                        int v = stack.back();
                        stack.pop_back();
                        if (v < mt.n_blocks) sub = sub.set_union(bct.blocks[v]);
                        for (int w : fadj[v])
                            if (!seen[w]) {
                                seen[w] = 1;
                                stack.push_back(w);
                            }
                    }
                    int sep = y < mt.n_blocks ? -1 : mt.cut_ids[y - mt.n_blocks];
                    if (sep == -1) {
                        // child is a block: separator is the shared cut vertex
                        // between root and y; root must be a cut node then
                        sep = mt.cut_ids[root - mt.n_blocks];
                    }
                    sub.erase(sep);
                    if (!sub.empty()) cl.pendants.emplace_back(sep, sub);
                }

                P2Witness w = check_P2(g, cl.vertices);
                require(w.ok, "InternalError", "cluster lost P2");
                cl.boundary_order = w.boundary_order;
                cluster_ids.push_back(static_cast<int>(part.clusters.size()));
                part.clusters.push_back(std::move(cl));
            }
        }
        part.component_clusters.push_back(cluster_ids);
        part.component_interfaces.push_back(gamma_i);
    }
    return part;
}

/// C1: well-linked (exact below threshold, else heuristic verdict) with P1
/// and P2; the P2 witness also provides the boundary curve.
inline bool check_C1(const Graph &g, const Cluster &c, double alpha_star,
                     const OracleConfig &cfg) {
    OracleConfig vcfg = cfg;
    WellLinkedCertificate cert;
    try {
        cert = is_well_linked(g, c.vertices, alpha_star, vcfg);
    } catch (const Error &e) {
        if (e.code() != "TooLargeForExact") throw;
        vcfg.mode = OracleMode::Heuristic;
        cert = is_well_linked(g, c.vertices, alpha_star, vcfg);
    }
    return cert.well_linked && check_P1(g, c.vertices) && check_P2(g, c.vertices).ok;
}

/// C2: |interface| <= 2, or the interface sits in a 2-connected core with
/// pendants separated by single vertices.
inline bool check_C2(const Graph &g, const Cluster &c) {
    if (c.interface.size() <= 2) return true;
    if (!c.interface.subset_of(c.core)) return false;
    if (c.core.size() >= 3) {
        BlockCutTree t = block_cut_tree(g, c.core);
        if (t.blocks.size() != 1) return false; // not 2-connected
    }
    // pendants: removing the separator disconnects the pendant from the rest
    for (const auto &[sep, r] : c.pendants) {
        VertexSet rest = c.vertices.set_minus(r);
        rest.erase(sep);
        if (r.empty()) continue;
        for (const Edge &e : cut_profile(g, r).out) {
            int outside = r.contains(e.u) ? e.v : e.u;
            if (rest.contains(outside)) return false;
        }
    }
    return true;
}

/// C3: clusters pairwise share at most one vertex, and only an interface one.
inline bool check_C3(const Graph &g, const ClusterPartition &p) {
    (void)g;
    for (size_t i = 0; i < p.clusters.size(); ++i)
        for (size_t j = i + 1; j < p.clusters.size(); ++j) {
            VertexSet shared = p.clusters[i].vertices.set_intersect(p.clusters[j].vertices);
            if (shared.size() > 1) return false;
            if (shared.size() == 1) {
                int v = shared.items()[0];
                if (!p.clusters[i].interface.contains(v) ||
                    !p.clusters[j].interface.contains(v))
                    return false;
            }
        }
    return true;
}

/// C4: per component, total cluster interface at most 9 |Gamma_i|.
inline bool check_C4(const ClusterPartition &p) {
    for (size_t i = 0; i < p.component_clusters.size(); ++i) {
        long long sum = 0;
        for (int ci : p.component_clusters[i]) sum += p.clusters[ci].interface.size();
        long long gi = p.component_interfaces[i].size();
        if (sum > 9 * std::max<long long>(gi, 1)) return false;
    }
    return true;
}

/// C5: cluster size at least (alpha* |Gamma(X)|)^2 / (64 d_max^2).
inline bool check_C5(const Cluster &c, double alpha_star, int d_max) {
    double lhs = static_cast<double>(c.vertices.size());
    double gs = alpha_star * c.interface.size();
    return lhs >= gs * gs / (64.0 * d_max * d_max) - 1e-9;
}

/// Replace each cluster with its grid gadget: |Gamma|=1 -> single vertex,
/// |Gamma|=2 -> single edge, else a |Gamma| x |Gamma| grid, with the first
/// row matched to the interface in the witness boundary order.
inline ContractedGraph build_contracted_graph(const Graph &g, const ClusterPartition &part) {
    ContractedGraph cg;
    cg.partition = part;
    cg.s_root = part.s;

    // retained root vertices: everything outside S plus all interfaces
    VertexSet retained = VertexSet::range(g.n()).set_minus(part.s);
    for (const Cluster &c : part.clusters) retained = retained.set_union(c.interface);

    cg.root_to_h.assign(g.n(), -1);
    for (int v : retained) {
        cg.root_to_h[v] = static_cast<int>(cg.to_root.size());
        cg.to_root.push_back(v);
    }

    EdgeSet hes;
    // edges of G untouched by the contraction: not inside any cluster
    for (const Edge &e : g.edges()) {
        if (cg.root_to_h[e.u] < 0 || cg.root_to_h[e.v] < 0) continue;
        bool internal = false;
        for (const Cluster &c : part.clusters)
            if (c.vertices.contains(e.u) && c.vertices.contains(e.v)) {
                internal = true;
                break;
            }
        if (!internal) hes.emplace_back(cg.root_to_h[e.u], cg.root_to_h[e.v]);
    }

    long long gadget_total = 0;
    for (size_t ci = 0; ci < part.clusters.size(); ++ci) {
        const Cluster &c = part.clusters[ci];
        int k = c.interface.size();
        std::vector<int> order = c.boundary_order;
        if (static_cast<int>(order.size()) != k) order = c.interface.items();

        int base = static_cast<int>(cg.to_root.size());
        VertexSet zset;
        EdgeSet matching;
        if (k == 0) {
            cg.to_root.push_back(-1);
            zset.insert(base);
        } else if (k == 1) {
            cg.to_root.push_back(-1);
            zset.insert(base);
            matching.emplace_back(base, cg.root_to_h[order[0]]);
        } else if (k == 2) {
            cg.to_root.push_back(-1);
            cg.to_root.push_back(-1);
            zset.insert(base);
            zset.insert(base + 1);
            hes.emplace_back(base, base + 1);
            matching.emplace_back(base, cg.root_to_h[order[0]]);
            matching.emplace_back(base + 1, cg.root_to_h[order[1]]);
        } else {
            Graph grid = make_grid(k);
            for (int i = 0; i < grid.n(); ++i) cg.to_root.push_back(-1);
            for (int i = 0; i < grid.n(); ++i) zset.insert(base + i);
            for (const Edge &e : grid.edges()) hes.emplace_back(base + e.u, base + e.v);
            for (int i = 0; i < k; ++i)
                matching.emplace_back(base + i, cg.root_to_h[order[i]]);
        }
        gadget_total += zset.size() + k;
        for (const Edge &e : matching) hes.push_back(e);
        cg.zs.grids.push_back(zset);
        cg.grid_cluster.push_back(static_cast<int>(ci));
        cg.matchings.push_back(matching);
    }
    normalize(hes);
    cg.h = Graph(static_cast<int>(cg.to_root.size()), hes);

    // size bound of the contraction step
    long long gamma_s = cut_profile(g, part.s).interface.size();
    long long d = std::max(1, g.d_max());
    require(gadget_total <= 162 * d * d * std::max<long long>(1, gamma_s * gamma_s),
            "InternalError", "contracted gadgets exceed the size bound");
    return cg;
}

/// Nasty-set verdict: P1, P2 and |S| >= coeff * |Gamma(S)|^2 where coeff is
/// the (possibly sigma-scaled) nasty threshold coefficient.
struct NastySetReport {
    VertexSet set;
    long long size = 0;
    long long gamma = 0;
    double threshold = 0.0;
    bool p1 = false, p2 = false;
    bool nasty = false;
};

inline NastySetReport detect_nasty(const Graph &g, const VertexSet &s, double coeff) {
    NastySetReport r;
    r.set = s;
    r.size = s.size();
    r.gamma = cut_profile(g, s).interface.size();
    r.threshold = coeff * static_cast<double>(r.gamma) * static_cast<double>(r.gamma);
    r.p1 = check_P1(g, s);
    r.p2 = r.p1 && check_P2(g, s).ok;
    r.nasty = r.p1 && r.p2 && static_cast<double>(r.size) >= r.threshold;
    return r;
}

/// Lift a canonical planarizing set of the contracted graph back to the
/// host: matching edges in E* charge all host edges at their interface
/// vertex, everything else maps through identity.
inline EdgeSet lift_solution(const EdgeSet &e_star_h, const ContractedGraph &cg,
                             const Graph &g) {
    EdgeSet grid_edges = cg.zs.grid_edges(cg.h);
    require(edge_intersect(e_star_h, grid_edges).empty(), "NonCanonicalInput",
            "solution uses grid edges");
    EdgeSet lifted;
    VertexSet charged_interfaces;
    for (const Edge &e : e_star_h) {
        int ru = cg.to_root[e.u], rv = cg.to_root[e.v];
        if (ru >= 0 && rv >= 0) {
            lifted.emplace_back(ru, rv); // plain host edge
        } else {
            // matching edge: exactly one endpoint is a grid vertex
            require((ru >= 0) != (rv >= 0), "NonCanonicalInput",
                    "edge between two grid vertices");
            charged_interfaces.insert(std::max(ru, rv));
        }
    }
    for (int v : charged_interfaces)
        for (int w : g.neighbors(v)) lifted.emplace_back(v, w);
    normalize(lifted);
    require(static_cast<long long>(lifted.size()) <=
                static_cast<long long>(g.d_max()) *
                    std::max<long long>(1, static_cast<long long>(e_star_h.size())),
            "InternalError", "lifted solution exceeds d_max * |E*|");
    if (is_planar(cg.h.without_edges(e_star_h)))
        require(is_planar(g.without_edges(lifted)), "InternalError",
                "lifted solution is not planarizing");
    return lifted;
}

/// Re-contraction after a nasty canonical set R is found in H: clean up
/// barely-attached grids, expand the rest back into the host, and partition
/// the expansion afresh. The new contracted graph is strictly smaller.
inline std::pair<VertexSet, ContractedGraph> recontract_after_nasty(const Graph &g,
                                                                    const ContractedGraph &cg,
                                                                    VertexSet r, double coeff,
                                                                    double alpha_star,
                                                                    const OracleConfig &cfg) {
    require(cg.zs.canonical(r), "NotCanonical", "R must be canonical in H");
    NastySetReport rep = detect_nasty(cg.h, r, coeff);
    require(rep.nasty, "NotNasty", "R is not nasty");

    // cleanup: drop grids with at most a quarter of their terminals inside R
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t zi = 0; zi < cg.zs.grids.size(); ++zi) {
            const VertexSet &z = cg.zs.grids[zi];
            if (!z.subset_of(r)) continue;
            CutProfile cp = cut_profile(cg.h, z);
            VertexSet t_in = cp.terminals.set_intersect(r);
            if (4 * t_in.size() <= cp.terminals.size()) {
                r = r.set_minus(z);
                changed = true;
                NastySetReport again = detect_nasty(cg.h, r, coeff);
                require(again.nasty, "InternalError", "cleanup destroyed nastiness");
            }
        }
    }

    // grids inside R expand to their clusters; the rest keep their clusters
    VertexSet s2_star;
    for (int v : r)
        if (cg.to_root[v] >= 0) s2_star.insert(cg.to_root[v]);
    std::vector<char> cluster_kept(cg.partition.clusters.size(), 1);
    for (size_t zi = 0; zi < cg.zs.grids.size(); ++zi) {
        const VertexSet &z = cg.zs.grids[zi];
        if (z.subset_of(r)) {
            const Cluster &cl = cg.partition.clusters[cg.grid_cluster[zi]];
            s2_star = s2_star.set_union(cl.vertices.set_minus(cl.interface));
            cluster_kept[cg.grid_cluster[zi]] = 0;
        }
    }
    // interface vertices of expanded clusters that lie in R are already in
    // s2_star through to_root; strip the new interface
    VertexSet s2 = s2_star.set_minus(cut_profile(g, s2_star).interface);

    // new partition: kept clusters plus a fresh partition of s2
    ClusterPartition np;
    np.alpha_star = alpha_star;
    VertexSet s1;
    for (size_t ci = 0; ci < cg.partition.clusters.size(); ++ci)
        if (cluster_kept[ci]) {
            np.clusters.push_back(cg.partition.clusters[ci]);
            s1 = s1.set_union(cg.partition.clusters[ci].vertices);
        }
    // kept clusters keep their per-component grouping for the C4 ledger
    for (size_t i = 0; i < cg.partition.component_clusters.size(); ++i) {
        std::vector<int> ids;
        for (int ci : cg.partition.component_clusters[i])
            if (cluster_kept[ci]) {
                int new_id = 0;
                for (int cj = 0; cj < ci; ++cj) new_id += cluster_kept[cj];
                ids.push_back(new_id);
            }
        if (!ids.empty()) {
            np.component_clusters.push_back(ids);
            np.component_interfaces.push_back(cg.partition.component_interfaces[i]);
        }
    }
    if (!s2.empty()) {
        ClusterPartition p2 = partition_cluster_set(g, s2, alpha_star, cfg);
        int offset = static_cast<int>(np.clusters.size());
        for (auto &c : p2.clusters) np.clusters.push_back(c);
        for (size_t i = 0; i < p2.component_clusters.size(); ++i) {
            std::vector<int> ids;
            for (int ci : p2.component_clusters[i]) ids.push_back(ci + offset);
            np.component_clusters.push_back(ids);
            np.component_interfaces.push_back(p2.component_interfaces[i]);
        }
    }
    np.s = s1.set_union(s2);

    ContractedGraph nh = build_contracted_graph(g, np);
    require(nh.h.n() < cg.h.n(), "InternalError",
            "re-contraction did not shrink the contracted graph");
    return {np.s, nh};
}

} // namespace planarize
