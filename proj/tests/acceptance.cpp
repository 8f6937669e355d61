// Acceptance suite: one criterion per section, each printing a PASS/FAIL
// line. Run `acceptance` for all criteria or `acceptance <k>` for one.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "planarize/contraction.hpp"
#include "planarize/insertion.hpp"
#include "planarize/io.hpp"
#include "planarize/solve.hpp"

using namespace planarize;

namespace {

constexpr double kDeskSigma = 1e-40;

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string &)> run;
};

Graph complete_graph(int n) {
    EdgeSet es;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) es.emplace_back(i, j);
    return Graph(n, es);
}

Graph complete_bipartite(int a, int b) {
    EdgeSet es;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) es.emplace_back(i, a + j);
    return Graph(a + b, es);
}

Graph petersen() {
    EdgeSet es;
    for (int i = 0; i < 5; ++i) {
        es.emplace_back(i, (i + 1) % 5);
        es.emplace_back(i, i + 5);
        es.emplace_back(i + 5, (i + 2) % 5 + 5);
    }
    return Graph(10, es);
}

Graph random_connected(Rng &rng, int n, int extra, int deg_cap) {
    EdgeSet es;
    std::vector<int> deg(n, 0);
    for (int v = 1; v < n; ++v) {
        int u = rng.next_int(v), tries = 0;
        while (deg[u] >= deg_cap && tries++ < 4 * n) u = rng.next_int(v);
        es.emplace_back(u, v);
        ++deg[u];
        ++deg[v];
    }
    normalize(es);
    int added = 0, attempts = 0;
    while (added < extra && attempts++ < 50 * extra + 100) {
        int u = rng.next_int(n), v = rng.next_int(n);
        if (u == v || deg[u] >= deg_cap || deg[v] >= deg_cap) continue;
        Edge e(u, v);
        if (edge_in(es, e)) continue;
        es.push_back(e);
        normalize(es);
        ++deg[u];
        ++deg[v];
        ++added;
    }
    return Graph(n, es);
}

// ---- criterion 1: grid-cut claims -----------------------------------------

bool criterion_grid_cuts(std::string &detail) {
    long long checked = 0;
    for (int k = 2; k <= 4; ++k) {
        Graph z = make_grid(k);
        int n = z.n();
        VertexSet gamma = grid_first_row(k);
        for (uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
            long long cut = 0;
            for (const Edge &e : z.edges()) {
                bool a = (mask >> e.u) & 1, b = (mask >> e.v) & 1;
                if (a != b) ++cut;
            }
            long long ga = 0, gb = 0, na = 0, nb = 0;
            for (int v = 0; v < n; ++v) {
                bool a = (mask >> v) & 1;
                (a ? na : nb) += 1;
                if (gamma.contains(v)) (a ? ga : gb) += 1;
            }
            ++checked;
            // Claim: |E(A,B)| >= min(|A ∩ Γ|, |B ∩ Γ|) + 1
            if (cut < std::min(ga, gb) + 1) {
                detail = "cut-of-grids violated at k=" + std::to_string(k);
                return false;
            }
            // Claim: the side with the minority interface has <= 4 M^2 vertices
            if (k <= 3) {
                if (ga <= gb && na > 4 * cut * cut) {
                    detail = "cutting-the-grid violated at k=" + std::to_string(k);
                    return false;
                }
                if (gb <= ga && nb > 4 * cut * cut) {
                    detail = "cutting-the-grid violated at k=" + std::to_string(k);
                    return false;
                }
            }
        }
    }
    detail = std::to_string(checked) + " partitions checked";
    return true;
}

// ---- criterion 2: well-linked decomposition --------------------------------

bool criterion_well_linked(std::string &detail) {
    Rng rng(20240817);
    int done = 0, splits = 0;
    OracleConfig cfg;
    cfg.exact_limit = 16;
    while (done < 200) {
        int n = 12 + rng.next_int(29); // up to 40
        Graph g = random_connected(rng, n, rng.next_int(n / 2), 5);
        bool with_grid = done % 3 == 2;
        GridFamily zs;
        VertexSet j;
        if (with_grid) {
            // plant a 2x2 grid inside the graph: reuse 4 fresh vertices
            EdgeSet es = g.edges();
            int base = g.n();
            Graph z = make_grid(2);
            for (const Edge &e : z.edges()) es.emplace_back(base + e.u, base + e.v);
            es.emplace_back(base, rng.next_int(n));
            es.emplace_back(base + 1, rng.next_int(n));
            normalize(es);
            g = Graph(base + 4, es);
            std::vector<int> zv{base, base + 1, base + 2, base + 3};
            zs.grids.push_back(VertexSet(zv));
            std::vector<int> pick = zv;
            while (static_cast<int>(pick.size()) < 10) {
                int v = rng.next_int(base);
                if (std::find(pick.begin(), pick.end(), v) == pick.end()) pick.push_back(v);
            }
            j = VertexSet(pick);
        } else {
            std::vector<int> pick;
            int sz = 2 + rng.next_int(15);
            while (static_cast<int>(pick.size()) < std::min(sz, n - 1)) {
                int v = rng.next_int(n);
                if (std::find(pick.begin(), pick.end(), v) == pick.end()) pick.push_back(v);
            }
            j = VertexSet(pick);
        }
        DecomposeFlags flags;
        flags.p1 = check_P1(g, j);
        flags.p2 = check_P2(g, j).ok;
        flags.canonical = with_grid && zs.canonical(j);
        double alpha_star = 1.0 / (8.0 * std::max(1.0, std::log2(g.n())));
        DecompositionResult res;
        try {
            res = well_linked_decompose(g, j, zs, flags, alpha_star, cfg);
        } catch (const Error &e) {
            detail = std::string("decompose failed: ") + e.what();
            return false;
        }
        // partition of J
        VertexSet total;
        for (const auto &p : res.pieces) {
            if (total.intersects(p)) {
                detail = "pieces overlap";
                return false;
            }
            total = total.set_union(p);
        }
        if (!(total == j)) {
            detail = "pieces do not cover J";
            return false;
        }
        if (res.charge > std::max<long long>(2 * res.out_j, 2)) {
            detail = "charge exceeds 2|out(J)|";
            return false;
        }
        for (const auto &p : res.pieces) {
            auto cert = is_well_linked(g, p, alpha_star, cfg);
            if (!cert.well_linked) {
                detail = "piece fails exact well-linkedness";
                return false;
            }
            if (flags.p1 && !check_P1(g, p)) {
                detail = "piece lost P1";
                return false;
            }
            if (flags.p2 && !check_P2(g, p).ok) {
                detail = "piece lost P2";
                return false;
            }
            if (flags.canonical && !zs.canonical(p)) {
                detail = "piece lost canonicality";
                return false;
            }
        }
        splits += res.splits;
        ++done;
    }
    detail = "200 instances, " + std::to_string(splits) + " splits total";
    return true;
}

// ---- criterion 3: canonical min cut ----------------------------------------

bool criterion_canonical_cut(std::string &detail) {
    Rng rng(333);
    int done = 0;
    while (done < 200) {
        int nh = 3 + rng.next_int(4);
        Graph host = random_connected(rng, nh, rng.next_int(nh), 5);
        int k = 2 + rng.next_int(2);
        if (nh + k * k > 14) continue;
        EdgeSet es = host.edges();
        int base = nh;
        Graph z = make_grid(k);
        for (const Edge &e : z.edges()) es.emplace_back(base + e.u, base + e.v);
        for (int i = 0; i < k; ++i) es.emplace_back(base + i, rng.next_int(nh));
        EdgeSet check = es;
        normalize(check);
        if (check.size() != es.size()) continue; // duplicate matching edge draw
        Graph g(nh + z.n(), check);
        GridFamily zs;
        std::vector<int> zv(z.n());
        std::iota(zv.begin(), zv.end(), base);
        zs.grids.push_back(VertexSet(zv));
        int s = rng.next_int(nh), t = rng.next_int(nh);
        if (s == t) continue;
        Cut c;
        try {
            c = canonical_min_cut(g, zs, VertexSet{s}, VertexSet{t});
        } catch (const Error &e) {
            detail = std::string("canonical_min_cut failed: ") + e.what();
            return false;
        }
        // brute-force minimum s-t cut value
        long long best = 1LL << 40;
        int n = g.n();
        for (int mask = 0; mask < (1 << n); ++mask) {
            if (!(mask & (1 << s)) || (mask & (1 << t))) continue;
            long long val = 0;
            for (const Edge &e : g.edges()) {
                bool a = mask & (1 << e.u), b = mask & (1 << e.v);
                if (a != b) ++val;
            }
            best = std::min(best, val);
        }
        if (c.value != best) {
            detail = "cut value differs from brute force";
            return false;
        }
        if (!zs.canonical(c.side_a) || !zs.canonical(c.side_b)) {
            detail = "cut splits a grid";
            return false;
        }
        ++done;
    }
    detail = "200 grid-augmented instances";
    return true;
}

// ---- criterion 4: LP rounding factor ---------------------------------------

bool criterion_lp_rounding(std::string &detail) {
    Rng rng(44);
    int done = 0;
    while (done < 200) {
        int m = 3 + rng.next_int(10);  // cluster size up to 12 real vertices
        int k = 2 + rng.next_int(3);   // 2..4 segments
        // skeleton cycle 0..7; C' = vertex 8 with k anchors; C on 9..8+m
        std::vector<std::pair<int, int>> extra;
        std::vector<int> anchors;
        while (static_cast<int>(anchors.size()) < k) {
            int a = rng.next_int(8);
            if (std::find(anchors.begin(), anchors.end(), a) == anchors.end())
                anchors.push_back(a);
        }
        for (int a : anchors) extra.emplace_back(8, a);
        for (int v = 1; v < m; ++v) extra.emplace_back(9 + rng.next_int(v), 9 + v);
        for (int e = 0; e < m / 2; ++e) {
            int a = 9 + rng.next_int(m), b = 9 + rng.next_int(m);
            if (a != b) extra.emplace_back(std::min(a, b), std::max(a, b));
        }
        int anchored = 1 + rng.next_int(std::min(4, m));
        for (int i = 0; i < anchored; ++i) extra.emplace_back(9 + rng.next_int(m), rng.next_int(8));
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        EdgeSet es;
        for (int i = 0; i < 8; ++i) es.emplace_back(i, (i + 1) % 8);
        bool bad = false;
        for (auto [a, b] : extra) {
            if (a == b) bad = true;
            else es.emplace_back(a, b);
        }
        if (bad) continue;
        EdgeSet check = es;
        normalize(check);
        if (check.size() != es.size()) continue;
        Graph host(9 + m, check);
        EdgeSet k_edges;
        for (int i = 0; i < 8; ++i) k_edges.emplace_back(i, (i + 1) % 8);
        normalize(k_edges);
        TildeGraph t = build_tilde_graph(host, VertexSet::range(host.n()), VertexSet::range(8),
                                         k_edges, {});
        auto clusters = tilde_clusters(t);
        const FaceCluster *c = nullptr, *c2 = nullptr;
        for (const auto &cl : clusters)
            for (int v : cl.vertices) {
                if (t.to_host[v] == 8) c2 = &cl;
                if (t.to_host[v] == 9) c = &cl;
            }
        if (!c || !c2 || c == c2) continue;
        if (static_cast<int>(c2->delta.size()) != k) continue;
        std::vector<int> cyc;
        for (int i = 0; i < 8; ++i) cyc.push_back(i);
        FaceBoundary fb = make_boundary(cyc, t.g.n());
        PairCutResult r = resolve_pair_lp(t, *c, *c2, fb);
        if (r.infeasible) continue;
        if (static_cast<double>(r.cut.size()) > 30.0 * r.lp_opt + 1e-6) {
            detail = "cut exceeds 30 x LP optimum";
            return false;
        }
        // enumeration oracle: minimum valid assignment
        {
            std::vector<int> seg_pos;
            for (int v : c2->delta) seg_pos.push_back(fb.pos[v]);
            std::sort(seg_pos.begin(), seg_pos.end());
            int kk = static_cast<int>(seg_pos.size());
            auto classify = [&](int pos) -> std::pair<int, int> {
                for (int i = 0; i < kk; ++i)
                    if (seg_pos[i] == pos) return {(i + kk - 1) % kk, i};
                for (int i = 0; i < kk; ++i) {
                    int a = seg_pos[i], b = seg_pos[(i + 1) % kk];
                    bool inside = a < b ? (pos > a && pos < b) : (pos > a || pos < b);
                    if (inside) return {i, -1};
                }
                return {0, -1};
            };
            std::vector<int> verts = c->vertices.items();
            int nv = static_cast<int>(verts.size());
            std::vector<std::vector<int>> options(nv);
            long long combos = 1;
            for (int i = 0; i < nv; ++i) {
                int v = verts[i];
                if (t.artificial[v]) {
                    auto [a, b] = classify(fb.pos[t.anchor[v]]);
                    options[i] = b < 0 ? std::vector<int>{a} : std::vector<int>{a, b};
                } else {
                    for (int s0 = 0; s0 < kk; ++s0) options[i].push_back(s0);
                }
                combos *= static_cast<long long>(options[i].size());
                if (combos > (1LL << 24)) break;
            }
            if (combos > (1LL << 24)) continue; // enumeration not feasible; resample
            std::vector<int> idx(t.g.n(), -1);
            for (int i = 0; i < nv; ++i) idx[verts[i]] = i;
            long long bestv = 1LL << 40;
            std::vector<int> assign(nv, 0);
            std::function<void(int)> rec = [&](int i) {
                if (i == nv) {
                    long long cutv = 0;
                    for (const Edge &e : t.g.edges()) {
                        if (idx[e.u] < 0 || idx[e.v] < 0) continue;
                        if (assign[idx[e.u]] != assign[idx[e.v]]) ++cutv;
                    }
                    bestv = std::min(bestv, cutv);
                    return;
                }
                for (int s0 : options[i]) {
                    assign[i] = s0;
                    rec(i + 1);
                }
            };
            rec(0);
            if (static_cast<long long>(r.cut.size()) > 30 * bestv) {
                detail = "cut exceeds 30 x the exact assignment optimum";
                return false;
            }
        }
        ++done;
    }
    detail = "200 conflict instances";
    return true;
}

// ---- criterion 5: contraction round trip ------------------------------------

struct Blob {
    Graph g;
    VertexSet s;
};

Blob make_blob_instance(Rng &rng) {
    // outer cycle, one or two planar blobs attached through stalks
    int cyc = 5 + rng.next_int(4);
    EdgeSet es;
    for (int i = 0; i < cyc; ++i) es.emplace_back(i, (i + 1) % cyc);
    int k = 3 + rng.next_int(2);
    Graph grid = make_grid(k);
    int base = cyc;
    for (const Edge &e : grid.edges()) es.emplace_back(base + e.u, base + e.v);
    int n_attach = 2 + rng.next_int(2);
    VertexSet s;
    for (int i = 0; i < grid.n(); ++i) s.insert(base + i);
    int next = base + grid.n();
    for (int i = 0; i < n_attach; ++i) {
        // stalk from a first-row grid vertex to a cycle vertex
        int gv = base + (i * (k - 1)) % k;
        int cv = (i * 2) % cyc;
        if (rng.bernoulli(0.5)) {
            es.emplace_back(next, gv);
            es.emplace_back(next, cv);
            s.insert(next);
            ++next;
        } else {
            es.emplace_back(gv, cv);
        }
    }
    normalize(es);
    return {Graph(next, es), s};
}

bool criterion_contraction(std::string &detail) {
    Rng rng(555);
    OracleConfig cfg;
    cfg.exact_limit = 16;
    int done = 0;
    double alpha_star = 0.25;
    while (done < 100) {
        Blob b = make_blob_instance(rng);
        if (!check_P1(b.g, b.s) || !check_P2(b.g, b.s).ok) continue;
        ClusterPartition p;
        ContractedGraph cg;
        try {
            p = partition_cluster_set(b.g, b.s, alpha_star, cfg);
            cg = build_contracted_graph(b.g, p);
        } catch (const Error &e) {
            detail = std::string("contraction failed: ") + e.what();
            return false;
        }
        for (const Cluster &c : p.clusters) {
            if (!check_C1(b.g, c, alpha_star, cfg)) {
                detail = "C1 failed";
                return false;
            }
            if (!check_C2(b.g, c)) {
                detail = "C2 failed";
                return false;
            }
            if (!check_C5(c, alpha_star, b.g.d_max())) {
                detail = "C5 failed";
                return false;
            }
        }
        if (!check_C3(b.g, p)) {
            detail = "C3 failed";
            return false;
        }
        if (!check_C4(p)) {
            detail = "C4 failed";
            return false;
        }
        // size bound of the gadget replacement (also asserted inside build)
        long long gadget_total = 0;
        for (size_t zi = 0; zi < cg.zs.grids.size(); ++zi)
            gadget_total += cg.zs.grids[zi].size() +
                            cg.partition.clusters[cg.grid_cluster[zi]].interface.size();
        long long gs = cut_profile(b.g, b.s).interface.size();
        long long d = b.g.d_max();
        if (gadget_total > 162 * d * d * std::max<long long>(1, gs * gs)) {
            detail = "size bound violated";
            return false;
        }
        // lift a canonical planarizing set of H
        Parameters par = compute_parameters(cg.h.n(), cg.h.d_max(), 1, kDeskSigma);
        Instance root;
        root.vertices = VertexSet::range(cg.h.n());
        EdgeSet e_h = stopping_solve(cg.h, root, cg.zs, par, cfg, nullptr);
        EdgeSet lifted;
        try {
            lifted = lift_solution(e_h, cg, b.g); // verifies planarity internally
        } catch (const Error &e) {
            detail = std::string("lift failed: ") + e.what();
            return false;
        }
        if (static_cast<long long>(lifted.size()) >
            static_cast<long long>(b.g.d_max()) *
                std::max<long long>(1, static_cast<long long>(e_h.size()))) {
            detail = "lift exceeds d_max |E*|";
            return false;
        }
        if (!is_planar(b.g.without_edges(lifted))) {
            detail = "lifted solution not planarizing";
            return false;
        }
        ++done;
    }
    detail = "100 constructed pairs";
    return true;
}

// ---- criterion 6: nasty re-contraction ---------------------------------------

bool criterion_recontract(std::string &detail) {
    Rng rng(666);
    OracleConfig cfg;
    cfg.exact_limit = 16;
    int done = 0;
    double alpha_star = 0.25;
    while (done < 20) {
        // two stalked grid blobs on a cycle (as in the unit fixture, sizes vary)
        int k = 4 + rng.next_int(2);
        int cyc = 6;
        EdgeSet es;
        for (int i = 0; i < cyc; ++i) es.emplace_back(i, (i + 1) % cyc);
        Graph grid = make_grid(k);
        auto add_blob = [&](int base, int a1, int a2) {
            for (const Edge &e : grid.edges()) es.emplace_back(base + e.u, base + e.v);
            es.emplace_back(base + grid.n(), base + 0);
            es.emplace_back(base + grid.n(), a1);
            es.emplace_back(base + grid.n() + 1, base + k - 1);
            es.emplace_back(base + grid.n() + 1, a2);
        };
        int base_a = cyc, base_b = cyc + grid.n() + 2;
        add_blob(base_a, 0, 1);
        add_blob(base_b, 3, 4);
        normalize(es);
        Graph g(base_b + grid.n() + 2, es);
        VertexSet sa, sb;
        for (int i = 0; i < grid.n() + 2; ++i) {
            sa.insert(base_a + i);
            sb.insert(base_b + i);
        }
        if (!check_P1(g, sa) || !check_P2(g, sa).ok) continue;
        double coeff = 2.0 + rng.next_real();
        try {
            ClusterPartition p = partition_cluster_set(g, sa, alpha_star, cfg);
            ContractedGraph cg = build_contracted_graph(g, p);
            VertexSet r;
            for (int v : sb) r.insert(cg.root_to_h[v]);
            if (!detect_nasty(cg.h, r, coeff).nasty) continue;
            auto [s2, nh] = recontract_after_nasty(g, cg, r, coeff, alpha_star, cfg);
            if (nh.h.n() >= cg.h.n()) {
                detail = "re-contraction did not shrink";
                return false;
            }
        } catch (const Error &e) {
            detail = std::string("recontract failed: ") + e.what();
            return false;
        }
        ++done;
    }
    detail = "20 constructed nasty instances";
    return true;
}

// ---- criterion 7: tiny-scale optimality ---------------------------------------

bool criterion_tiny_optimal(std::string &detail) {
    SolveConfig cfg;
    cfg.sigma = kDeskSigma;
    cfg.oracle = OracleMode::Exact;
    struct Known {
        Graph g;
        size_t opt;
        const char *name;
    };
    std::vector<Known> knowns;
    knowns.push_back({complete_graph(5), 1, "K5"});
    knowns.push_back({complete_bipartite(3, 3), 1, "K3,3"});
    knowns.push_back({complete_graph(6), 3, "K6"});
    knowns.push_back({petersen(), 2, "Petersen"});
    for (const Known &kn : knowns) {
        auto oracle = exhaustive_planarization(kn.g, 4);
        if (!oracle || oracle->size() != kn.opt) {
            detail = std::string("oracle value wrong for ") + kn.name;
            return false;
        }
        auto r = solve(kn.g, cfg);
        if (!r.verified || r.e_star.size() != kn.opt) {
            detail = std::string("solve not optimal on ") + kn.name;
            return false;
        }
    }
    Rng rng(777);
    int done = 0;
    while (done < 50) {
        int n = 5 + rng.next_int(6);
        Graph g = random_connected(rng, n, rng.next_int(2 * n), n);
        auto oracle = exhaustive_planarization(g, 4);
        if (!oracle) continue; // above the oracle budget
        SolveConfig c2 = cfg;
        c2.seed = 1000 + done;
        auto r = solve(g, c2);
        if (!r.verified || r.e_star.size() != oracle->size()) {
            detail = "solve not optimal on a random tiny graph";
            return false;
        }
        ++done;
    }
    detail = "4 named + 50 random graphs, all optimal";
    return true;
}

// ---- criterion 8: medium-scale soundness ---------------------------------------

bool criterion_medium_sound(std::string &detail) {
    Rng rng(888);
    int done = 0;
    long long total_removed = 0;
    while (done < 50) {
        int n = 40 + rng.next_int(261); // up to 300
        int extra = rng.next_int(n);
        Graph g = random_connected(rng, n, extra, 6);
        SolveConfig cfg;
        cfg.sigma = kDeskSigma;
        cfg.oracle = OracleMode::Heuristic;
        cfg.seed = 4242 + done;
        auto r = solve(g, cfg);
        if (!r.verified) {
            detail = "unverified run at n=" + std::to_string(n);
            return false;
        }
        if (!is_planar(g.without_edges(r.e_star))) {
            detail = "non-planar residual";
            return false;
        }
        if (static_cast<long long>(r.e_star.size()) < skewness_lower_bound(g)) {
            detail = "below the skewness lower bound";
            return false;
        }
        for (const GuessReport &gr : r.guesses)
            if (gr.failure.find("Invariant") != std::string::npos) {
                detail = "an engine run violated a V-invariant: " + gr.failure;
                return false;
            }
        total_removed += static_cast<long long>(r.e_star.size());
        ++done;
    }
    detail = "50 graphs, total |E*| = " + std::to_string(total_removed);
    return true;
}

// ---- criterion 9: reproducibility ----------------------------------------------

bool criterion_reproducible(std::string &detail) {
    Rng rng(999);
    for (int it = 0; it < 5; ++it) {
        Graph g = random_connected(rng, 30 + 20 * it, 10 + it * 5, 5);
        SolveConfig cfg;
        cfg.sigma = kDeskSigma;
        cfg.oracle = it % 2 == 0 ? OracleMode::Exact : OracleMode::Heuristic;
        cfg.seed = 31337 + it;
        auto r1 = solve(g, cfg);
        auto r2 = solve(g, cfg);
        if (run_report(g, cfg, r1).dump(2) != run_report(g, cfg, r2).dump(2)) {
            detail = "reports differ between identical runs";
            return false;
        }
    }
    detail = "5 graph/config pairs, byte-identical reports";
    return true;
}

} // namespace

int main(int argc, char **argv) {
    std::vector<Criterion> criteria{
        {1, "grid-cut claims (exhaustive, k=2..4 and k=2..3)", criterion_grid_cuts},
        {2, "well-linked decomposition on 200 random instances", criterion_well_linked},
        {3, "canonical min-cut vs brute force on 200 instances", criterion_canonical_cut},
        {4, "LP rounding factor on 200 conflict instances", criterion_lp_rounding},
        {5, "contraction round-trip on 100 constructed pairs", criterion_contraction},
        {6, "nasty re-contraction strictly shrinks", criterion_recontract},
        {7, "tiny-scale optimality vs the exhaustive oracle", criterion_tiny_optimal},
        {8, "medium-scale soundness on 50 random graphs", criterion_medium_sound},
        {9, "bit-identical reports for identical runs", criterion_reproducible},
    };
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failures = 0;
    for (const Criterion &c : criteria) {
        if (only != 0 && c.id != only) continue;
        auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception &e) {
            detail = std::string("exception: ") + e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::printf("criterion %d: %s — %s (%s, %lld ms)\n", c.id, ok ? "PASS" : "FAIL",
                    c.name.c_str(), detail.c_str(), static_cast<long long>(ms));
        if (!ok) ++failures;
    }
    return failures;
}
