#include <catch2/catch_amalgamated.hpp>

#include "planarize/io.hpp"
#include "test_util.hpp"

using namespace planarize;
using namespace planarize::testutil;

TEST_CASE("edge list parse and write round trip") {
    Graph tri = parse_edge_list("3 3\n0 1\n1 2\n0 2\n");
    CHECK(tri.n() == 3);
    CHECK(tri.m() == 3);
    CHECK(write_edge_list(tri) == "3 3\n0 1\n0 2\n1 2\n");

    CHECK_THROWS_WITH(parse_edge_list("3 5\n0 1\n"),
                      Catch::Matchers::ContainsSubstring("ParseError"));
    CHECK_THROWS_WITH(parse_edge_list("nonsense\n"),
                      Catch::Matchers::ContainsSubstring("MalformedHeader"));

    Rng rng(12);
    for (int it = 0; it < 20; ++it) {
        Graph g = random_graph(rng, 3 + rng.next_int(20), rng.next_int(30), 8);
        Graph h = parse_edge_list(write_edge_list(g));
        CHECK(h.edges() == g.edges());
        CHECK(h.n() == g.n());
    }
}

TEST_CASE("graph6 decode matches edge list") {
    // K4 in graph6 is 'C~'
    Graph k4 = parse_graph6("C~");
    CHECK(k4.n() == 4);
    CHECK(k4.m() == 6);
    CHECK(k4.edges() == complete_graph(4).edges());

    // round trip on random graphs
    Rng rng(77);
    for (int it = 0; it < 30; ++it) {
        Graph g = random_graph(rng, 2 + rng.next_int(20), rng.next_int(30), 10);
        Graph h = parse_graph6(write_graph6(g));
        CHECK(h.n() == g.n());
        CHECK(h.edges() == g.edges());
    }

    // optional header prefix accepted
    CHECK(parse_graph6(">>graph6<<C~").m() == 6);
}

TEST_CASE("min-uncut instance JSON round trip") {
    std::vector<MinUncutConstraint> cs{{0, 1, 5}, {1, 2, -1}};
    json j = min_uncut_to_json(3, cs);
    auto [n, back] = min_uncut_from_json(j);
    CHECK(n == 3);
    REQUIRE(back.size() == 2);
    CHECK(back[0].w == 5);
    CHECK(back[1].w == -1);
}

TEST_CASE("rotation system serialization shape") {
    RotationSystem rs = planar_embedding(complete_graph(4));
    json j = to_json(rs);
    CHECK(j.contains("rotation"));
    CHECK(j.contains("faces"));
    CHECK(j["rotation"].size() == 4);
    CHECK(j["faces"].size() == 4);
}

TEST_CASE("run report is byte-stable across identical runs") {
    Graph g = petersen();
    SolveConfig cfg;
    cfg.sigma = 1e-40;
    cfg.seed = 5;
    auto r1 = solve(g, cfg);
    auto r2 = solve(g, cfg);
    CHECK(run_report(g, cfg, r1).dump(2) == run_report(g, cfg, r2).dump(2));
}
