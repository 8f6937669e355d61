#include <catch2/catch_amalgamated.hpp>

#include "planarize/well_linked.hpp"
#include "test_util.hpp"

using namespace planarize;
using namespace planarize::testutil;

namespace {

// host with a k x k grid whose first row carries out-edges to k fresh leaves
Graph grid_with_leaves(int k) {
    Graph zg = make_grid(k);
    EdgeSet es = zg.edges();
    for (int i = 0; i < k; ++i) es.emplace_back(i, zg.n() + i);
    normalize(es);
    return Graph(zg.n() + k, es);
}

} // namespace

TEST_CASE("is_well_linked on grids and degenerate sets") {
    OracleConfig cfg;
    for (int k = 2; k <= 3; ++k) {
        Graph g = grid_with_leaves(k);
        VertexSet j = VertexSet::range(k * k);
        auto cert = is_well_linked(g, j, 1.0, cfg);
        CHECK(cert.well_linked); // grids are 1-well-linked on their first row
    }

    // two vertices, no edge between them, each with an out-edge
    Graph g2 = build_graph(4, {{0, 2}, {1, 3}});
    auto bad = is_well_linked(g2, VertexSet{0, 1}, 0.5, OracleConfig{});
    CHECK_FALSE(bad.well_linked);
    CHECK(static_cast<long long>(bad.cut.size()) < 0.5 * std::min(bad.t1, bad.t2));

    // single vertex: vacuous
    CHECK(is_well_linked(g2, VertexSet{0}, 1.0, OracleConfig{}).well_linked);
}

TEST_CASE("is_well_linked vertex route matches interface route") {
    Rng rng(42);
    for (int it = 0; it < 40; ++it) {
        int n = 6 + rng.next_int(6);
        Graph g = random_connected_graph(rng, n, rng.next_int(n), 5);
        std::vector<int> pick;
        for (int v = 0; v < n; ++v)
            if (rng.bernoulli(0.5)) pick.push_back(v);
        VertexSet j(pick);
        if (j.empty() || j.size() == n) continue;
        double alpha = 0.25 + 0.5 * rng.next_real();
        OracleConfig via_vertices;
        via_vertices.exact_limit = 14;
        auto a = is_well_linked(g, j, alpha, via_vertices);
        // force the interface route by shrinking the vertex threshold
        CutProfile cp = cut_profile(g, j);
        if (cp.interface.size() > 12 || cp.interface.size() <= 1) continue;
        OracleConfig via_gamma;
        via_gamma.exact_limit = std::max(2, cp.interface.size());
        if (j.size() <= via_gamma.exact_limit) continue; // would use vertex route anyway
        auto b = is_well_linked(g, j, alpha, via_gamma);
        CHECK(a.well_linked == b.well_linked);
    }
}

TEST_CASE("check_P1") {
    // path 0-1-2-3-4, J={2}: terminals 1 and 3 are separated
    Graph p = path_graph(5);
    CHECK_FALSE(check_P1(p, VertexSet{2}));
    CHECK(check_P1(p, VertexSet{0})); // single terminal
    // cycle: removing an interior set keeps the rest connected
    Graph c = cycle_graph(6);
    CHECK(check_P1(c, VertexSet{0, 1}));
}

TEST_CASE("check_P2") {
    Graph g = grid_with_leaves(3);
    auto w = check_P2(g, VertexSet::range(9));
    CHECK(w.ok);
    CHECK(w.boundary_order.size() == 3);

    // K5 as J: not planar, so no P2
    Graph k5 = complete_graph(5);
    CHECK_FALSE(check_P2(k5, VertexSet::range(5)).ok);

    // no interface: P2 iff planar
    CHECK(check_P2(make_grid(2), VertexSet::range(4)).ok);
}

TEST_CASE("well_linked_decompose: already well-linked set stays whole") {
    Graph g = grid_with_leaves(3);
    VertexSet j = VertexSet::range(9);
    OracleConfig cfg;
    auto res = well_linked_decompose(g, j, GridFamily{}, DecomposeFlags{}, 0.5, cfg);
    CHECK(res.pieces.size() == 1);
    CHECK(res.pieces[0] == j);
}

TEST_CASE("well_linked_decompose splits a bridge pair of cliques") {
    // two K4s joined by one edge; out edges on both sides
    EdgeSet es;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            es.emplace_back(i, j);
            es.emplace_back(4 + i, 4 + j);
        }
    es.emplace_back(0, 4);
    // leaves outside J
    es.emplace_back(1, 8);
    es.emplace_back(2, 9);
    es.emplace_back(5, 10);
    es.emplace_back(6, 11);
    normalize(es);
    Graph g(12, es);
    VertexSet j = VertexSet::range(8);
    OracleConfig cfg;
    auto res = well_linked_decompose(g, j, GridFamily{}, DecomposeFlags{}, 0.6, cfg);
    CHECK(res.pieces.size() >= 2);
    CHECK(res.charge <= 2 * res.out_j);
    for (const auto &cert : res.certificates) CHECK(cert.well_linked);
}

TEST_CASE("well_linked_decompose preserves flags on random instances") {
    Rng rng(777);
    int ran = 0;
    for (int it = 0; it < 120 && ran < 40; ++it) {
        int n = 8 + rng.next_int(8);
        Graph g = random_connected_graph(rng, n, rng.next_int(6), 4);
        std::vector<int> pick;
        int sz = std::min(n - 1, 3 + rng.next_int(8));
        while (static_cast<int>(pick.size()) < sz) {
            int v = rng.next_int(n);
            if (std::find(pick.begin(), pick.end(), v) == pick.end()) pick.push_back(v);
        }
        VertexSet j(pick);
        if (j.size() == n) continue;
        DecomposeFlags flags;
        flags.p1 = check_P1(g, j);
        flags.p2 = check_P2(g, j).ok;
        if (!flags.p1 || !flags.p2) continue;
        ++ran;
        OracleConfig cfg;
        cfg.exact_limit = 14;
        auto res = well_linked_decompose(g, j, GridFamily{}, flags, 0.25, cfg);
        // partition property
        VertexSet all;
        for (const auto &p : res.pieces) {
            for (int v : p) CHECK_FALSE(all.contains(v));
            all = all.set_union(p);
        }
        CHECK(all == j);
        CHECK(res.charge <= std::max<long long>(2 * res.out_j, 2));
        for (const auto &p : res.pieces) {
            CHECK(check_P1(g, p));
            CHECK(check_P2(g, p).ok);
        }
    }
    CHECK(ran >= 20);
}

TEST_CASE("well_linked_decompose canonical flag keeps grids whole") {
    // J = 2x2 grid + two extra vertices hanging on a sparse cut
    Graph zg = make_grid(2);
    EdgeSet es = zg.edges();
    es.emplace_back(0, 4); // extra vertex 4 tied to grid corner
    es.emplace_back(4, 5);
    es.emplace_back(5, 6); // 6 outside J
    es.emplace_back(1, 7); // grid matching edge to outside
    es.emplace_back(0, 8);
    normalize(es);
    Graph g(9, es);
    GridFamily zs;
    zs.grids.push_back(VertexSet::range(4));
    VertexSet j{0, 1, 2, 3, 4, 5};
    DecomposeFlags flags;
    flags.canonical = true;
    OracleConfig cfg;
    auto res = well_linked_decompose(g, j, zs, flags, 0.9, cfg);
    for (const auto &p : res.pieces) CHECK(zs.canonical(p));
}

TEST_CASE("numbers_bound") {
    CHECK(numbers_bound({{4, 2}}, 1, 4, 2));
    CHECK(numbers_bound({{0, 0}}, 1, 1, 0));
    CHECK_THROWS_WITH(numbers_bound({{5, 1}}, 1, 10, 5),
                      Catch::Matchers::ContainsSubstring("PreconditionViolated"));

    // randomized property check of the claim itself
    Rng rng(31415);
    for (int it = 0; it < 1000; ++it) {
        double beta = 0.5 + 4 * rng.next_real();
        double m = 1 + 20 * rng.next_real();
        int k = 1 + rng.next_int(12);
        std::vector<std::pair<double, double>> rs;
        double s = 0;
        for (int i = 0; i < k; ++i) {
            double y = 3 * rng.next_real();
            double x = std::min(m, beta * y * y) * rng.next_real();
            rs.emplace_back(x, y);
            s += y;
        }
        CHECK(numbers_bound(rs, beta, m, s));
    }
}

TEST_CASE("extended sets inherit well-linkedness through witness paths") {
    // A is the first-row-terminal grid; A' adds disjoint chains, each
    // carrying one new out edge whose witness path reaches A along the chain
    Rng rng(1003);
    OracleConfig cfg;
    cfg.exact_limit = 16;
    for (int it = 0; it < 25; ++it) {
        int k = 2 + rng.next_int(2);
        Graph zg = make_grid(k);
        int base = zg.n();
        EdgeSet es = zg.edges();
        // out edges of A: one leaf per first-row vertex
        int next = base;
        for (int i = 0; i < k; ++i) es.emplace_back(i, next++);
        std::vector<int> a_ids(base);
        std::iota(a_ids.begin(), a_ids.end(), 0);
        VertexSet a(a_ids);
        // chains appended to distinct grid vertices
        int chains = 1 + rng.next_int(2);
        VertexSet a_ext = a;
        for (int c = 0; c < chains; ++c) {
            int attach = rng.next_int(base);
            int len = 1 + rng.next_int(2);
            int prev = attach;
            for (int i = 0; i < len; ++i) {
                es.emplace_back(prev, next);
                a_ext.insert(next);
                prev = next++;
            }
            es.emplace_back(prev, next++); // the new out edge of A'
        }
        normalize(es);
        Graph g(next, es);
        double alpha = 0.5;
        auto base_cert = is_well_linked(g, a, alpha, cfg);
        if (!base_cert.well_linked) continue;
        auto ext_cert = is_well_linked(g, a_ext, alpha, cfg);
        CHECK(ext_cert.well_linked);
    }
}
