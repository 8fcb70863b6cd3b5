#include "doctest.h"
#include "oracles.hpp"

#include "latprof/error.hpp"
#include "latprof/graph_core.hpp"

using namespace latprof;

namespace {

using Names = std::vector<std::string>;

Decimal d(const char* s) { return *Decimal::parse(s); }

} // namespace

TEST_CASE("edge list parsing") {
    auto g = parse_edge_list("# comment\na b 2.5\nb c\n\nlonely\n");
    CHECK(g.directed());
    CHECK(g.nodes() == std::set<std::string>{"a", "b", "c", "lonely"});
    REQUIRE(g.edges().size() == 2);
    CHECK(g.edges()[0].weight == d("2.5"));
    CHECK(g.edges()[1].weight == Decimal::from_int(1));
    CHECK_THROWS_AS(parse_edge_list("a b c d\n"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("a b x\n"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("a b -1\n"), AnalysisError);
    CHECK_THROWS_AS(parse_edge_list("a b\na b 2\n"), AnalysisError);
    CHECK_NOTHROW(parse_edge_list("a b\nb a\n"));
    CHECK_THROWS_AS(parse_edge_list("a b\nb a\n", true), AnalysisError);
}

TEST_CASE("topological order prefers the smallest ready node") {
    auto g = parse_edge_list("c d\na d\nb c\n");
    CHECK(topo_sort(g) == Names{"a", "b", "c", "d"});
    auto cyc = parse_edge_list("a b\nb c\nc b\nc d\n");
    try {
        topo_sort(cyc);
        FAIL("expected a cycle");
    } catch (const CycleError& e) {
        CHECK(e.witness() == Names{"b", "c"});
    }
    CHECK_THROWS_AS(topo_sort(parse_edge_list("a b\n", true)), AnalysisError);
}

TEST_CASE("critical path on a small DAG") {
    auto g = parse_edge_list("s a 3\ns b 2\na t 1\nb t 1\nt u 1\n");
    auto p = critical_path(g, "s");
    CHECK(p.nodes == Names{"s", "a", "t", "u"});
    CHECK(p.weight == Decimal::from_int(5));
    auto single = critical_path(g, "u");
    CHECK(single.nodes == Names{"u"});
    CHECK_THROWS_AS(critical_path(g, "zz"), AnalysisError);
    CHECK_THROWS_AS(critical_path(parse_edge_list("a b\nb a\n"), "a"), CycleError);
}

TEST_CASE("shortest path with ties and unreachable targets") {
    auto g = parse_edge_list("a c 1\na b 1\nb d 1\nc d 1\nd e 0.5\n");
    auto p = shortest_path(g, "a", "e");
    CHECK(p.nodes == Names{"a", "b", "d", "e"});
    CHECK(p.weight == d("2.5"));
    CHECK(shortest_path(g, "a", "a").nodes == Names{"a"});
    CHECK_THROWS_AS(shortest_path(g, "e", "a"), AnalysisError);
    auto u = parse_edge_list("a b 1\nb c 1\n", true);
    CHECK(shortest_path(u, "c", "a").nodes == Names{"c", "b", "a"});
}

TEST_CASE("zero-weight cycles do not trap the path reconstruction") {
    auto g = parse_edge_list("a b 0\nb a 0\nb c 0\na c 1\n");
    auto p = shortest_path(g, "a", "c");
    CHECK(p.nodes == Names{"a", "b", "c"});
    CHECK(p.weight == Decimal{});
}

TEST_CASE("minimum spanning tree") {
    auto g = parse_edge_list("a b 1\nb c 2\na c 2\nc d 1\n", true);
    auto t = minimum_spanning_tree(g);
    CHECK(t.total == Decimal::from_int(4));
    REQUIRE(t.edges.size() == 3);
    CHECK(t.edges[2].src == "a");
    CHECK(t.edges[2].dst == "c");
    CHECK_THROWS_AS(minimum_spanning_tree(parse_edge_list("a b\nc d\n", true)), AnalysisError);
    CHECK_THROWS_AS(minimum_spanning_tree(parse_edge_list("a b\n")), AnalysisError);
}

TEST_CASE("elementary cycles including self-loops") {
    auto g = parse_edge_list("a b\nb c\nc a\na c\nc c\n");
    auto c = detect_cycles(g);
    CHECK(c == std::vector<Names>{{"a", "b", "c"}, {"a", "c"}, {"c"}});
    CHECK(detect_cycles(g, 2) == std::vector<Names>{{"a", "c"}, {"c"}});
    CHECK(detect_cycles(parse_edge_list("a b\nb c\n")).empty());
}

TEST_CASE("graph algorithms agree with exhaustive enumeration") {
    oracle::Rng rng(31337);
    for (int round = 0; round < 300; ++round) {
        const auto n = static_cast<std::size_t>(rng.between(1, 7));

        auto dg = oracle::random_graph(rng, n, 0.35, true, false, true);
        const auto s = oracle::node_name(static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(n) - 1)));
        const auto t = oracle::node_name(static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(n) - 1)));
        auto expected = oracle::shortest(dg, s, t);
        if (expected) {
            auto got = shortest_path(dg, s, t);
            CHECK(got.weight == expected->weight);
            CHECK(got.nodes == expected->nodes);
        } else {
            CHECK_THROWS_AS(shortest_path(dg, s, t), AnalysisError);
        }
        CHECK(detect_cycles(dg, 8) == oracle::cycles(dg, 8));
        CHECK(detect_cycles(dg, 3) == oracle::cycles(dg, 3));

        auto dag = oracle::random_graph(rng, n, 0.4, true, true);
        auto cp = critical_path(dag, s);
        auto heavy = oracle::heaviest(dag, s);
        CHECK(cp.weight == heavy.weight);
        CHECK(cp.nodes == heavy.nodes);

        auto ug = oracle::random_graph(rng, n, 0.5, false);
        auto best = oracle::mst_weight(ug);
        if (best) {
            auto tree = minimum_spanning_tree(ug);
            CHECK(tree.total == *best);
            CHECK(tree.edges.size() == n - 1);
        } else {
            CHECK_THROWS_AS(minimum_spanning_tree(ug), AnalysisError);
        }
        auto us = oracle::shortest(ug, s, t);
        if (us) CHECK(shortest_path(ug, s, t).nodes == us->nodes);
    }
}
