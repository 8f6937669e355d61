#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "planarize/flows.hpp"
#include "planarize/graph.hpp"
#include "planarize/oracles.hpp"
#include "planarize/planarity.hpp"

namespace planarize {

/// Verdict of a well-linkedness test. When violating, (j1, j2) is a
/// partition of J with |E(j1,j2)| < alpha * min(t1, t2), where t1/t2 count
/// the out(J) edges attached to each side.
struct WellLinkedCertificate {
    VertexSet set_j;
    double alpha = 0.0;
    bool well_linked = false;
    VertexSet j1, j2;
    EdgeSet cut;
    long long t1 = 0, t2 = 0;
    OracleMode mode = OracleMode::Exact;
};

namespace detail {

struct SideStats {
    long long cut = 0, t1 = 0, t2 = 0;
};

// E(J1,J2), and per-side counts of out(J) edges, for a side indicator over J
inline SideStats side_stats(const Graph &g, const VertexSet &j, const std::vector<char> &in_a,
                            const std::vector<int> &local_of) {
    SideStats s;
    for (const Edge &e : g.edges()) {
        int lu = local_of[e.u], lv = local_of[e.v];
        if (lu >= 0 && lv >= 0) {
            if (in_a[lu] != in_a[lv]) ++s.cut;
        } else if (lu >= 0) {
            (in_a[lu] ? s.t1 : s.t2) += 1; // out edge, interface endpoint u
        } else if (lv >= 0) {
            (in_a[lv] ? s.t1 : s.t2) += 1;
        }
    }
    return s;
}

} // namespace detail

/// Exact or heuristic well-linkedness check of J inside g: every partition
/// (J1,J2) must satisfy |E(J1,J2)| >= alpha * min(|T1|,|T2|). The exact mode
/// enumerates either the vertex side (2^|J|) or, if smaller, the interface
/// side (2^|Gamma| minimum cuts).
inline WellLinkedCertificate is_well_linked(const Graph &g, const VertexSet &j, double alpha,
                                            const OracleConfig &cfg) {
    require(alpha > 0 && alpha <= 1, "OutOfRange", "alpha must be in (0,1]");
    WellLinkedCertificate cert;
    cert.set_j = j;
    cert.alpha = alpha;
    cert.mode = cfg.mode;

    CutProfile cp = cut_profile(g, j);
    if (j.size() <= 1 || cp.interface.size() <= 1) {
        cert.well_linked = true; // at most one side can carry terminals
        return cert;
    }

    std::vector<int> local_of(g.n(), -1);
    for (int i = 0; i < j.size(); ++i) local_of[j.items()[i]] = i;

    auto record_violation = [&](const std::vector<char> &in_a, const detail::SideStats &s) {
        cert.well_linked = false;
        cert.t1 = s.t1;
        cert.t2 = s.t2;
        cert.j1 = VertexSet{};
        cert.j2 = VertexSet{};
        for (int i = 0; i < j.size(); ++i)
            (in_a[i] ? cert.j1 : cert.j2).insert(j.items()[i]);
        cert.cut = edges_between(g, cert.j1, cert.j2);
    };

    if (cfg.mode == OracleMode::Exact) {
        int nj = j.size();
        if (nj <= cfg.exact_limit) {
            cert.well_linked = true;
            double best = 1e18;
            std::vector<char> in_a(nj, 0);
            for (uint64_t mask = 1; mask + 1 < (1ULL << nj); ++mask) {
                for (int i = 0; i < nj; ++i) in_a[i] = (mask >> i) & 1;
                auto s = detail::side_stats(g, j, in_a, local_of);
                long long mn = std::min(s.t1, s.t2);
                if (mn <= 0) continue;
                if (s.cut < alpha * mn - 1e-9) {
                    double sparsity = static_cast<double>(s.cut) / mn;
                    if (sparsity < best) {
                        best = sparsity;
                        record_violation(in_a, s);
                    }
                }
            }
            return cert;
        }
        int ng = cp.interface.size();
        require(ng <= cfg.exact_limit, "TooLargeForExact",
                "set and interface both above exhaustive threshold");
        // enumerate interface partitions; min cut realizes the best E(J1,J2)
        Subgraph s = induced_subgraph(g, j);
        std::vector<long long> out_at(ng, 0);
        for (const Edge &e : cp.out) {
            int iv = j.contains(e.u) ? e.u : e.v;
            int idx = static_cast<int>(std::lower_bound(cp.interface.begin(), cp.interface.end(),
                                                        iv) -
                                       cp.interface.begin());
            ++out_at[idx];
        }
        cert.well_linked = true;
        double best = 1e18;
        for (uint64_t mask = 1; mask + 1 < (1ULL << ng); ++mask) {
            VertexSet g1, g2;
            long long t1 = 0, t2 = 0;
            for (int i = 0; i < ng; ++i) {
                int root_v = cp.interface.items()[i];
                if ((mask >> i) & 1) {
                    g1.insert(s.local(root_v));
                    t1 += out_at[i];
                } else {
                    g2.insert(s.local(root_v));
                    t2 += out_at[i];
                }
            }
            long long mn = std::min(t1, t2);
            if (mn <= 0) continue;
            Cut c = min_cut(s.g, g1, g2);
            if (c.value < alpha * mn - 1e-9) {
                double sparsity = static_cast<double>(c.value) / mn;
                if (sparsity < best) {
                    best = sparsity;
                    std::vector<char> in_a(j.size(), 0);
                    for (int lv : c.side_a) in_a[lv] = 1;
                    auto stats = detail::side_stats(g, j, in_a, local_of);
                    record_violation(in_a, stats);
                }
            }
        }
        return cert;
    }

    // heuristic: sparsest cut on the stub-augmented local graph
    Subgraph sj = induced_subgraph(g, j);
    int base = sj.g.n();
    EdgeSet es = sj.g.edges();
    std::vector<long long> w(base + cp.out.size(), 0);
    for (size_t i = 0; i < cp.out.size(); ++i) {
        const Edge &e = cp.out[i];
        int iv = j.contains(e.u) ? e.u : e.v;
        es.emplace_back(sj.local(iv), base + static_cast<int>(i));
        w[base + i] = 1;
    }
    normalize(es);
    Graph stubbed(base + static_cast<int>(cp.out.size()), es);
    OracleConfig hcfg = cfg;
    hcfg.mode = OracleMode::Heuristic;
    auto sc = sparsest_cut(stubbed, w, hcfg);
    cert.well_linked = true;
    if (sc.cut) {
        std::vector<char> in_a(j.size(), 0);
        for (int v : sc.cut->side_a)
            if (v < base) in_a[v] = 1;
        auto stats = detail::side_stats(g, j, in_a, local_of);
        long long mn = std::min(stats.t1, stats.t2);
        if (mn > 0 && stats.cut < alpha * mn - 1e-9) record_violation(in_a, stats);
    }
    return cert;
}

/// P1: the terminal vertices of J are connected in G \ J.
inline bool check_P1(const Graph &g, const VertexSet &j) {
    CutProfile cp = cut_profile(g, j);
    if (cp.terminals.size() <= 1) return true;
    VertexSet rest = VertexSet::range(g.n()).set_minus(j);
    auto comps = connected_components(g, rest);
    for (const auto &c : comps)
        if (cp.terminals.subset_of(c)) return true;
    return false;
}

/// P2: G[J] has a planar drawing with the whole interface on one face.
/// The witness is the cyclic order of the interface around that face.
struct P2Witness {
    bool ok = false;
    std::vector<int> boundary_order; // root ids, cyclic
};

inline P2Witness check_P2(const Graph &g, const VertexSet &j) {
    CutProfile cp = cut_profile(g, j);
    Subgraph s = induced_subgraph(g, j);
    VertexSet local_gamma;
    for (int v : cp.interface) local_gamma.insert(s.local(v));
    P2Witness w;
    auto order = common_face_order(s.g, local_gamma);
    if (!order) return w;
    w.ok = true;
    for (int lv : *order) w.boundary_order.push_back(s.to_root[lv]);
    return w;
}

struct DecomposeFlags {
    bool p1 = false, p2 = false, canonical = false;
};

struct DecompositionResult {
    std::vector<VertexSet> pieces;
    std::vector<WellLinkedCertificate> certificates;
    long long charge = 0; // sum of |out(piece)|
    long long out_j = 0;
    double alpha_star = 0.0;
    DecomposeFlags flags;
    int splits = 0;
};

namespace detail {

// Violating canonical cut of `piece` at alpha, with grids treated as atoms.
// Exact when the atom count permits, otherwise heuristic with repair moves.
struct SplitSearch {
    bool found = false;
    VertexSet a, b;
    OracleMode mode = OracleMode::Exact;
};

inline SplitSearch find_violating_cut(const Graph &g, const VertexSet &piece,
                                      const GridFamily &zs, double alpha,
                                      const OracleConfig &cfg) {
    SplitSearch out;
    CutProfile cp = cut_profile(g, piece);
    if (piece.size() <= 1 || cp.interface.size() <= 1) return out;

    // atoms: grids inside the piece, plus loose vertices
    std::vector<VertexSet> atoms;
    VertexSet covered;
    for (const auto &z : zs.grids)
        if (z.subset_of(piece)) {
            atoms.push_back(z);
            covered = covered.set_union(z);
        }
    for (int v : piece.set_minus(covered)) atoms.push_back(VertexSet{v});
    int na = static_cast<int>(atoms.size());

    std::vector<int> local_of(g.n(), -1);
    for (int i = 0; i < piece.size(); ++i) local_of[piece.items()[i]] = i;

    auto eval_mask = [&](uint64_t mask) {
        std::vector<char> in_a(piece.size(), 0);
        for (int i = 0; i < na; ++i)
            if ((mask >> i) & 1)
                for (int v : atoms[i]) in_a[local_of[v]] = 1;
        auto s = side_stats(g, piece, in_a, local_of);
        return std::make_pair(in_a, s);
    };

    if (na <= cfg.exact_limit) {
        double best = 1e18;
        for (uint64_t mask = 1; mask + 1 < (1ULL << na); ++mask) {
            auto [in_a, s] = eval_mask(mask);
            long long mn = std::min(s.t1, s.t2);
            if (mn <= 0) continue;
            if (s.cut < alpha * mn - 1e-9) {
                double sp = static_cast<double>(s.cut) / mn;
                if (sp < best) {
                    best = sp;
                    out.found = true;
                    out.a = VertexSet{};
                    out.b = VertexSet{};
                    for (int i = 0; i < piece.size(); ++i)
                        (in_a[i] ? out.a : out.b).insert(piece.items()[i]);
                }
            }
        }
        out.mode = OracleMode::Exact;
        return out;
    }

    // heuristic cut, then the grid uncrossing moves from the decomposition
    OracleConfig hcfg = cfg;
    hcfg.mode = OracleMode::Heuristic;
    WellLinkedCertificate cert = is_well_linked(g, piece, alpha, hcfg);
    out.mode = OracleMode::Heuristic;
    if (cert.well_linked) return out;
    VertexSet a = cert.j1, b = cert.j2;
    // move each split grid wholly to one side, by the two-case rule
    bool moved = true;
    while (moved) {
        moved = false;
        for (const auto &z : zs.grids) {
            if (!z.subset_of(piece)) continue;
            VertexSet za = z.set_intersect(a);
            if (za.empty() || za.size() == z.size()) continue;
            // count out(Z) edges by the side of their endpoint inside Z;
            // move Z away from the lighter side (cut size strictly drops)
            long long to_a = 0, to_b = 0;
            for (const Edge &e : cut_profile(g, z).out) {
                int inside = z.contains(e.u) ? e.u : e.v;
                (a.contains(inside) ? to_a : to_b) += 1;
            }
            if (to_a <= to_b) {
                b = b.set_union(z);
                a = a.set_minus(z);
            } else {
                a = a.set_union(z);
                b = b.set_minus(z);
            }
            moved = true;
        }
    }
    if (a.empty() || b.empty()) return SplitSearch{};
    std::vector<char> in_a(piece.size(), 0);
    for (int v : a) in_a[local_of[v]] = 1;
    auto s = side_stats(g, piece, in_a, local_of);
    long long mn = std::min(s.t1, s.t2);
    if (mn <= 0 || s.cut >= alpha * mn - 1e-9) return SplitSearch{};
    out.found = true;
    out.a = a;
    out.b = b;
    return out;
}

// P1 repair: components of one side whose whole neighborhood lies in the
// other side move across; terminal counts are unchanged and the cut shrinks.
inline void p1_repair(const Graph &g, const VertexSet &piece, VertexSet &a, VertexSet &b) {
    bool moved = true;
    while (moved) {
        moved = false;
        for (int dir = 0; dir < 2 && !moved; ++dir) {
            VertexSet &from = dir == 0 ? b : a;
            VertexSet &to = dir == 0 ? a : b;
            for (const auto &c : connected_components(g, from)) {
                if (c.size() == from.size()) continue; // would empty the side
                // movable: at least one edge, and all of them into `to`
                // (each move then strictly shrinks E(A,B), so this ends)
                EdgeSet out = cut_profile(g, c).out;
                bool internal = !out.empty();
                for (const Edge &e : out) {
                    int outside = c.contains(e.u) ? e.v : e.u;
                    if (!to.contains(outside)) {
                        internal = false;
                        break;
                    }
                }
                if (internal) {
                    to = to.set_union(c);
                    from = from.set_minus(c);
                    moved = true;
                    break;
                }
            }
        }
    }
}

} // namespace detail

/// Well-linked decomposition: partition J so every piece is alpha_star
/// well-linked, charging at most 2|out(J)|. Requested properties (P1, P2,
/// canonical) are preserved piece-wise; cut search happens in the localized
/// graph G[J] + terminal stubs (+ apex when P2 is requested).
inline DecompositionResult well_linked_decompose(const Graph &g, const VertexSet &j,
                                                 const GridFamily &zs, DecomposeFlags flags,
                                                 double alpha_star, const OracleConfig &cfg) {
    if (flags.p1)
        require(check_P1(g, j), "PreconditionViolated", "J lacks P1");
    if (flags.p2)
        require(check_P2(g, j).ok, "PreconditionViolated", "J lacks P2");
    if (flags.canonical)
        require(zs.canonical(j), "PreconditionViolated", "J is not canonical");

    DecompositionResult res;
    res.alpha_star = alpha_star;
    res.flags = flags;
    res.out_j = static_cast<long long>(cut_profile(g, j).out.size());

    // localized working graph: G[J] + one stub per out edge (+ apex for P2)
    CutProfile cpj = cut_profile(g, j);
    Subgraph sj = induced_subgraph(g, j);
    int base = sj.g.n();
    int n_stub = static_cast<int>(cpj.out.size());
    int apex = flags.p2 ? base + n_stub : -1;
    EdgeSet wes = sj.g.edges();
    for (int i = 0; i < n_stub; ++i) {
        const Edge &e = cpj.out[i];
        int iv = j.contains(e.u) ? e.u : e.v;
        wes.emplace_back(sj.local(iv), base + i);
        if (flags.p2) wes.emplace_back(base + i, apex);
    }
    normalize(wes);
    Graph w(base + n_stub + (flags.p2 ? 1 : 0), wes);
    GridFamily local_zs;
    if (flags.canonical)
        for (const auto &z : zs.grids)
            if (z.subset_of(j)) {
                VertexSet lz;
                for (int v : z) lz.insert(sj.local(v));
                local_zs.grids.push_back(lz);
            }

    // initial pieces: connected components of G[J] (in local ids)
    std::vector<VertexSet> pending;
    for (const auto &c : connected_components(sj.g, VertexSet::range(base))) pending.push_back(c);

    std::vector<VertexSet> done;
    int guard = 0;
    while (!pending.empty()) {
        require(++guard < 100000, "InternalError", "decomposition did not terminate");
        VertexSet piece = pending.back();
        pending.pop_back();
        auto split = detail::find_violating_cut(w, piece, local_zs, alpha_star, cfg);
        if (!split.found) {
            done.push_back(piece);
            continue;
        }
        VertexSet a = split.a, b = split.b;
        if (flags.p1 || flags.p2) detail::p1_repair(w, piece, a, b);
        if (a.empty() || b.empty()) {
            done.push_back(piece);
            continue;
        }
        ++res.splits;
        // sides may be disconnected; keep them as single pieces per the
        // charging scheme (components split off in later rounds for free)
        pending.push_back(a);
        pending.push_back(b);
    }

    // map back to root ids and certify
    for (const auto &lp : done) {
        VertexSet piece;
        for (int lv : lp) piece.insert(sj.to_root[lv]);
        res.pieces.push_back(piece);
        res.charge += static_cast<long long>(cut_profile(g, piece).out.size());
    }
    std::sort(res.pieces.begin(), res.pieces.end(),
              [](const VertexSet &x, const VertexSet &y) { return x.items() < y.items(); });

    for (const auto &piece : res.pieces) {
        OracleConfig vcfg = cfg;
        WellLinkedCertificate cert;
        try {
            cert = is_well_linked(g, piece, alpha_star, vcfg);
        } catch (const Error &e) {
            if (e.code() != "TooLargeForExact") throw;
            vcfg.mode = OracleMode::Heuristic;
            cert = is_well_linked(g, piece, alpha_star, vcfg);
        }
        require(cert.well_linked, "InternalError", "decomposition piece not well-linked");
        res.certificates.push_back(cert);
        if (flags.p1)
            require(check_P1(g, piece), "InternalError", "piece lost P1");
        if (flags.p2)
            require(check_P2(g, piece).ok, "InternalError", "piece lost P2");
        if (flags.canonical)
            require(zs.canonical(piece), "InternalError", "piece lost canonicality");
    }
    require(res.charge <= 2 * std::max<long long>(res.out_j, 1) || res.pieces.size() <= 1,
            "InternalError", "decomposition charge exceeds 2|out(J)|");
    return res;
}

/// Arithmetic bound used by the size arguments: given numbers x <= beta*y^2,
/// x <= M, sum(y) <= S, checks sum(x) <= 2S*sqrt(beta*M) + M/4.
inline bool numbers_bound(const std::vector<std::pair<double, double>> &rs, double beta, double m,
                          double s) {
    require(beta > 0 && m > 0 && s >= 0, "PreconditionViolated", "bad parameters");
    double sum_x = 0, sum_y = 0;
    for (auto [x, y] : rs) {
        require(x >= 0 && y >= 0, "PreconditionViolated", "negative inputs");
        require(x <= beta * y * y + 1e-9, "PreconditionViolated", "x > beta*y^2");
        require(x <= m + 1e-9, "PreconditionViolated", "x > M");
        sum_x += x;
        sum_y += y;
    }
    require(sum_y <= s + 1e-9, "PreconditionViolated", "sum(y) > S");
    return sum_x <= 2 * s * std::sqrt(beta * m) + m / 4 + 1e-9;
}

} // namespace planarize
