#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <sstream>

#include "cutdesign/error.hpp"
#include "cutdesign/graph.hpp"
#include "support.hpp"

using namespace cutdesign;

namespace {

std::vector<Graph> all_connected(int n) {
    std::vector<Graph> out;
    for (int m = n - 1; m <= n * (n - 1) / 2; ++m)
        for (auto& g : connected_graphs(n, m)) out.push_back(g);
    return out;
}

Graph random_relabel(const Graph& g, std::mt19937& rng) {
    std::vector<int> perm(g.n_vertices());
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    return relabel(g, perm);
}

}  // namespace

TEST_CASE("construction rejects loops, duplicates and bad endpoints") {
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), Error);
    CHECK_THROWS_AS(Graph(3, {{1, 2}, {2, 1}}), Error);
    CHECK_THROWS_AS(Graph(3, {{1, 4}}), Error);
    Graph g(4, {{3, 1}, {2, 4}});
    CHECK(g.has_edge(1, 3));
    CHECK(g.edge_index(4, 2) == 1);
    CHECK_FALSE(g.is_connected());
}

TEST_CASE("partitions of C4 in run order") {
    const Graph c4 = Graph::cycle(4);
    const auto parts = enumerate_partitions(c4);
    REQUIRE(parts.size() == 8);
    CHECK(parts.front().side_b == 0);
    for (std::size_t r = 0; r < parts.size(); ++r) {
        CHECK(parts[r].run_index() == r);
        CHECK_FALSE(parts[r].contains(1));
    }
    CHECK(Partition::from_subset(0b0001, 4).side_b == 0b1110);
    CHECK(Partition::from_subset(0b1110, 4).side_b == 0b1110);
    CHECK(parts[1].label(4) == "2|134");
    CHECK(cut_set(c4, parts[0]).empty());
    // Every nonempty cut of a cycle has even size.
    for (auto p : parts) CHECK(cut_set(c4, p).size() % 2 == 0);
}

TEST_CASE("fundamental cycles of K4") {
    const auto sc = fundamental_cycles(Graph::complete(4));
    CHECK(sc.tree_edges.size() == 3);
    CHECK(sc.cycles.size() == 3);
    for (auto c : sc.cycles) CHECK(std::popcount(c) == 3);
    CHECK(testing::error_of([] { fundamental_cycles(Graph(3, {{1, 2}})); }) == ErrorCode::Disconnected);
}

TEST_CASE("cycle and cut spaces are orthogonal complements, n <= 6") {
    int graphs = 0;
    for (int n = 2; n <= 6; ++n)
        for (const auto& g : all_connected(n)) {
            ++graphs;
            const auto sp = binary_spaces(g);
            const std::size_t m = g.n_edges();
            CHECK(sp.cycle_space.dimension() == m - n + 1);
            CHECK(sp.cut_space.dimension() == static_cast<std::size_t>(n - 1));
            CHECK(f2_rank(sp.cycle_space.basis) == sp.cycle_space.dimension());
            CHECK(f2_rank(sp.cut_space.basis) == sp.cut_space.dimension());
            for (auto c : sp.cycle_space.basis)
                for (auto d : sp.cut_space.basis) CHECK(std::popcount(c & d) % 2 == 0);
            // Every cut lies in the cut space and distinct partitions give distinct cuts.
            std::set<EdgeSet> cuts;
            for (auto p : enumerate_partitions(g)) {
                const EdgeSet cut = cut_mask(g, p);
                CHECK(f2_in_span(sp.cut_space.basis, cut));
                cuts.insert(cut);
            }
            CHECK(cuts.size() == (std::size_t{1} << (n - 1)));
        }
    CHECK(graphs == 1 + 2 + 6 + 21 + 112);
}

TEST_CASE("connected graph counts") {
    CHECK(all_connected(4).size() == 6);
    CHECK(all_connected(5).size() == 21);
    CHECK(all_connected(6).size() == 112);
    CHECK(connected_graphs(5, 10).size() == 1);
}

TEST_CASE("K4 minor detection agrees with series-parallel reduction") {
    CHECK_FALSE(has_k4_minor(Graph::cycle(4)));
    CHECK(has_k4_minor(Graph::complete(4)));
    CHECK_FALSE(has_k4_minor(Graph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {3, 4}})));
    for (int n = 2; n <= 6; ++n)
        for (const auto& g : all_connected(n)) CHECK(has_k4_minor(g) != testing::k4_free_by_reduction(g));
}

TEST_CASE("ring graphs") {
    const auto table = reference_graphs_16runs();
    CHECK(is_ring_graph(testing::named(table, "G1")));
    CHECK(is_ring_graph(testing::named(table, "G2")));
    CHECK(is_ring_graph(Graph::path(4)));
    CHECK_FALSE(is_ring_graph(Graph::complete(4)));
    CHECK_FALSE(is_ring_graph(testing::named(table, "G11")));
    // Ring graphs have no K4 minor.
    for (int n = 2; n <= 6; ++n)
        for (const auto& g : all_connected(n))
            if (is_ring_graph(g)) CHECK_FALSE(has_k4_minor(g));
}

TEST_CASE("suspension and clique sums") {
    const auto table = reference_graphs_16runs();
    CHECK(isomorphic(suspension(Graph::cycle(4)), testing::named(table, "G8")));
    CHECK(isomorphic(suspension(Graph::complete(4)), Graph::complete(5)));

    const KSum g9 = k_sum(Graph::complete(4), Graph::cycle(3), {{3, 1}, {4, 2}});
    CHECK(g9.k == 1);
    CHECK(g9.graph.n_vertices() == 5);
    CHECK(g9.graph.n_edges() == 8);
    CHECK(isomorphic(g9.graph, testing::named(table, "G9")));
    CHECK(g9.g2_to_sum[1] == 3);
    CHECK(g9.g2_to_sum[3] == 5);

    const KSum g10 = k_sum(Graph::complete(4), Graph::complete(4), {{2, 1}, {3, 2}, {4, 3}});
    CHECK(isomorphic(g10.graph, testing::named(table, "G10")));

    CHECK(k_sum(Graph::cycle(3), Graph::cycle(3), {{1, 1}}).graph.n_vertices() == 5);
    CHECK(testing::error_of([] { k_sum(Graph::cycle(4), Graph::cycle(3), {{1, 1}, {3, 2}}); }) ==
          ErrorCode::NotAClique);
    CHECK(testing::error_of([] {
              k_sum(Graph::complete(4), Graph::complete(4), {{1, 1}, {2, 2}, {3, 3}, {4, 4}});
          }) == ErrorCode::UnsupportedK);
}

TEST_CASE("canonical code is invariant under relabelling") {
    std::mt19937 rng(11);
    for (int n = 3; n <= 6; ++n)
        for (const auto& g : all_connected(n)) {
            const Graph h = random_relabel(g, rng);
            CHECK(canonical_code(g) == canonical_code(h));
            CHECK(isomorphic(g, h));
        }
    CHECK_FALSE(isomorphic(Graph::cycle(5), Graph::path(5)));
}

TEST_CASE("girth") {
    CHECK(girth(Graph::cycle(5)) == 5);
    CHECK(girth(Graph::complete(4)) == 3);
    CHECK(girth(Graph::path(4)) == 0);
}

TEST_CASE("graph text round trip") {
    const Graph g = Graph::complete(4);
    std::stringstream s;
    write_graph(s, g);
    CHECK(s.str().rfind("4 6\n", 0) == 0);
    CHECK(read_graph(s) == g);
    std::istringstream bad("3 2\n1 2\n");
    CHECK_THROWS_AS(read_graph(bad), Error);
}

TEST_CASE("bundled graph files match the named graphs") {
    CHECK(isomorphic(read_graph_file(testing::data("graphs/c4.graph")), Graph::cycle(4)));
    CHECK(isomorphic(read_graph_file(testing::data("graphs/k4.graph")), Graph::complete(4)));
    for (const auto& [name, g] : reference_graphs_16runs()) {
        std::string file = name;
        for (auto& ch : file) ch = static_cast<char>(std::tolower(ch));
        CHECK(read_graph_file(testing::data("graphs/" + file + ".graph")) == g);
    }
}
