#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <set>
#include <sstream>

#include "cutdesign/error.hpp"
#include "cutdesign/markov.hpp"
#include "support.hpp"

using namespace cutdesign;

namespace {

// Move with +1 at runs a, b and -1 at c, d, found by partition label.
Move binomial(const DesignMatrix& d, const std::string& a, const std::string& b, const std::string& c,
              const std::string& e) {
    Move z(d.k(), 0);
    auto at = [&](const std::string& label) {
        auto it = std::find(d.run_labels.begin(), d.run_labels.end(), label);
        REQUIRE(it != d.run_labels.end());
        return static_cast<std::size_t>(it - d.run_labels.begin());
    };
    z[at(a)] += 1;
    z[at(b)] += 1;
    z[at(c)] -= 1;
    z[at(e)] -= 1;
    return normalize_move(z);
}

bool contains(const std::vector<Move>& moves, const Move& z) {
    const Move n = normalize_move(z);
    return std::find(moves.begin(), moves.end(), n) != moves.end();
}

// Brute-force Graver basis: conformally minimal nonzero kernel vectors with
// entries in [-b, b], one per sign pair.
std::vector<Move> graver_by_search(const IntMatrix& m, int b) {
    std::vector<Move> kernel;
    Move z(m.rows(), 0);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == z.size()) {
            if (std::any_of(z.begin(), z.end(), [](auto v) { return v != 0; }) && is_in_left_kernel(m, z) &&
                normalize_move(z) == z)
                kernel.push_back(z);
            return;
        }
        for (int v = -b; v <= b; ++v) {
            z[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    auto below = [](const Move& u, const Move& v) {  // u conformally below v, u != v
        if (u == v) return false;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u[i] * v[i] < 0 || std::abs(u[i]) > std::abs(v[i])) return false;
        return true;
    };
    std::vector<Move> out;
    for (const auto& v : kernel) {
        bool minimal = true;
        for (const auto& u : kernel) {
            Move neg(u.size());
            std::transform(u.begin(), u.end(), neg.begin(), [](auto x) { return -x; });
            if (below(u, v) || below(neg, v)) minimal = false;
        }
        if (minimal) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("move helpers") {
    CHECK(move_degree({1, -1, 2, -2}) == 3);
    CHECK(normalize_move({0, -1, 1}) == Move{0, 1, -1});
    MarkovBasis b;
    b.moves = {{1, -1, 0}};
    CHECK(b.max_degree() == 1);
    CHECK(b.as_matrix(3)(0, 1) == -1);
}

TEST_CASE("fiber enumeration agrees with brute force") {
    std::mt19937 rng(3);
    const std::vector<IntMatrix> configs = {
        model_matrix(design_from_relations(2, {})).columns,
        model_matrix(design_from_relations(3, {})).columns,
        model_matrix(design_from_relations(4, parse_relations("ABCD"))).columns,
        cut_configuration(Graph::cycle(4)).rows,
        cut_configuration(Graph::complete(4)).rows,
    };
    for (const auto& m : configs)
        for (int trial = 0; trial < 6; ++trial) {
            IntVector y(m.rows());
            for (auto& v : y) v = std::uniform_int_distribution<int>(0, 2)(rng);
            const Fiber f = enumerate_fiber(m, y);
            CHECK(f.members == testing::brute_fiber(m, y));
            CHECK(std::find(f.members.begin(), f.members.end(), y) != f.members.end());
        }
    const IntMatrix m2 = model_matrix(design_from_relations(2, {})).columns;
    CHECK(enumerate_fiber(m2, {2, 0, 0, 2}).members.size() == 3);
    CHECK(testing::error_of([&] { enumerate_fiber(m2, {50, 0, 0, 50}, 10); }) == ErrorCode::FiberTooLarge);
    const IntMatrix wave = model_matrix(testing::wave_design()).columns;
    CHECK(testing::error_of([&] { enumerate_fiber(wave, testing::wave_y(), 1000); }) == ErrorCode::FiberTooLarge);
}

TEST_CASE("Graver basis agrees with brute force on small configurations") {
    const IntMatrix c4 = cut_configuration(Graph::cycle(4)).rows;
    CHECK(graver_basis(c4) == graver_by_search(c4, 2));
    const IntMatrix k4e = cut_configuration(Graph(4, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}})).rows;
    CHECK(graver_basis(k4e) == graver_by_search(k4e, 2));
    const IntMatrix k4 = cut_configuration(Graph::complete(4)).rows;
    CHECK(graver_basis(k4) == graver_by_search(k4, 1));  // the kernel is spanned by one 0/+-1 vector
}

TEST_CASE("C4: three quadratic moves") {
    const Graph c4(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    const IntMatrix h = cut_configuration(c4).rows;
    const DesignMatrix d = design_from_graph(c4);
    const MarkovBasis b = markov_basis(h);
    REQUIRE(b.moves.size() == 3);
    CHECK(b.max_degree() == 2);
    CHECK(minimal_markov_size(h) == 3);
    // The three displayed generators: q(∅|1234) q(13|24) against the other
    // three pairs of the same fiber.
    const std::vector<Move> displayed = {binomial(d, "∅|1234", "24|13", "234|1", "3|124"),
                                         binomial(d, "∅|1234", "24|13", "2|134", "4|123"),
                                         binomial(d, "∅|1234", "24|13", "34|12", "23|14")};
    for (const auto& z : displayed) CHECK(contains(b.moves, z));
    std::set<Move> members;
    for (const auto& z : displayed) {
        Move plus(z.size()), minus(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            plus[i] = std::max<std::int64_t>(z[i], 0);
            minus[i] = std::max<std::int64_t>(-z[i], 0);
        }
        members.insert(plus);
        members.insert(minus);
    }
    REQUIRE(members.size() == 4);
    CHECK(enumerate_fiber(h, *members.begin()).members.size() == 4);
    CHECK(is_markov_basis(b.moves, h, 8));
    for (std::size_t drop = 0; drop < 3; ++drop) {
        auto fewer = b.moves;
        fewer.erase(fewer.begin() + static_cast<long>(drop));
        CHECK_FALSE(is_markov_basis(fewer, h, 4));
    }
    const auto quad = moves_up_to_degree(h, 2);
    for (const auto& z : b.moves) CHECK(contains(quad, z));
    CHECK(is_markov_basis(quad, h, 8));
}

TEST_CASE("K4: one quartic move") {
    const IntMatrix h = cut_configuration(Graph::complete(4)).rows;
    const MarkovBasis b = markov_basis(h);
    REQUIRE(b.moves.size() == 1);
    CHECK(move_degree(b.moves[0]) == 4);
    for (auto v : b.moves[0]) CHECK(std::abs(v) == 1);
    CHECK(moves_up_to_degree(h, 3).empty());
}

TEST_CASE("minimal bases: every move is needed") {
    for (const auto& [name, g] : reference_graphs_16runs()) {
        if (g.n_edges() > 8) continue;
        INFO(name);
        const IntMatrix h = cut_configuration(g).rows;
        const MarkovBasis b = markov_basis(h);
        CHECK(b.moves.size() == minimal_markov_size(h));
        const int bound = 2 * std::max(2, b.max_degree());
        CHECK(is_markov_basis(b.moves, h, bound));
        for (std::size_t drop = 0; drop < b.moves.size(); ++drop) {
            auto fewer = b.moves;
            fewer.erase(fewer.begin() + static_cast<long>(drop));
            CHECK_FALSE(is_markov_basis(fewer, h, bound));
        }
    }
}

TEST_CASE("wave-soldering main-effect basis") {
    const IntMatrix m = model_matrix(testing::wave_design()).columns;
    const MarkovBasis b = markov_basis(m);
    CHECK(b.moves.size() == 77);
    std::map<int, int> degrees;
    for (const auto& z : b.moves) {
        CHECK(is_in_left_kernel(m, z));
        ++degrees[move_degree(z)];
    }
    CHECK(degrees == std::map<int, int>{{2, 7}, {4, 70}});
    CHECK(minimal_markov_size(m) == 77);
    // Leading rows of the published listing.
    const std::vector<Move> listed = {
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, -1, -1, -1, -1, 1, 1},
        {0, 0, 0, 0, 0, 1, -1, 0, 1, 0, 0, -1, -1, -1, 1, 1},
        {0, 0, 0, 0, 0, 1, 0, -1, 0, 1, 0, -1, -1, -1, 1, 1},
        {0, 0, 0, 0, 1, 0, -1, 0, 1, 0, -1, 0, -1, -1, 1, 1},
        {0, 0, 0, 0, 1, 0, 0, -1, 0, 1, -1, 0, -1, -1, 1, 1},
        {0, 0, 0, 0, 1, 1, -1, -1, 0, 0, 0, 0, -1, -1, 1, 1},
        {0, 0, 0, 1, 0, 0, -1, 0, 1, 0, -1, -1, 0, -1, 1, 1},
    };
    for (const auto& z : listed) CHECK(contains(b.moves, z));
    CHECK(b.moves.front() == listed.front());
}

TEST_CASE("is_markov_basis input checks") {
    const IntMatrix h = cut_configuration(Graph::cycle(4)).rows;
    CHECK(testing::error_of([&] { is_markov_basis({{1, 0, 0, 0, 0, 0, 0, -1}}, h, 4); }) ==
          ErrorCode::InvalidMove);
    CHECK(testing::error_of([&] { is_markov_basis({{1, -1}}, h, 4); }) == ErrorCode::ShapeMismatch);
    CHECK_FALSE(is_markov_basis({}, h, 2));
}

TEST_CASE("Quad and Lift generate the cut ideal of G9 = K4 # C3") {
    const Graph k4 = Graph::complete(4), c3 = Graph::cycle(3);
    const Glue glue{{3, 1}, {4, 2}};
    const KSum sum = k_sum(k4, c3, glue);
    const IntMatrix h = cut_configuration(sum.graph).rows;
    const auto quad = quad_moves(k4, c3, glue);
    const auto lift = lift_moves(markov_basis(cut_configuration(k4).rows).moves, k4, c3, glue);
    CHECK(lift.size() == 16);  // one per choice of side for the new vertex in each of 4 factors
    for (const auto& z : quad) {
        CHECK(is_in_left_kernel(h, z));
        CHECK(move_degree(z) == 2);
    }
    for (const auto& z : lift) {
        CHECK(is_in_left_kernel(h, z));
        CHECK(move_degree(z) == 4);
    }
    auto all = quad;
    all.insert(all.end(), lift.begin(), lift.end());
    CHECK(is_markov_basis(all, h, 8));
    CHECK_FALSE(is_markov_basis(quad, h, 8));
    // Moves of the second part lift too; C3 has none.
    CHECK(lift_moves({}, k4, c3, glue, true).empty());
}

TEST_CASE("Quad and Lift on 0- and 2-sums") {
    // Two triangles at a vertex: ring graph, quadratic moves suffice.
    const Graph c3 = Graph::cycle(3);
    const Glue at_vertex{{1, 1}};
    const IntMatrix bowtie = cut_configuration(k_sum(c3, c3, at_vertex).graph).rows;
    const auto q0 = quad_moves(c3, c3, at_vertex);
    CHECK(is_markov_basis(q0, bowtie, 8));

    // C4 lifted along a vertex onto a pendant edge.
    const Graph c4 = Graph::cycle(4), edge = Graph::path(2);
    const IntMatrix pendant = cut_configuration(k_sum(c4, edge, at_vertex).graph).rows;
    auto gens = quad_moves(c4, edge, at_vertex);
    const auto lifted = lift_moves(markov_basis(cut_configuration(c4).rows).moves, c4, edge, at_vertex);
    gens.insert(gens.end(), lifted.begin(), lifted.end());
    CHECK(is_markov_basis(gens, pendant, 8));

    // G10 = K4 # K4 along a triangle.
    const Graph k4 = Graph::complete(4);
    const Glue triangle{{2, 1}, {3, 2}, {4, 3}};
    const IntMatrix g10 = cut_configuration(k_sum(k4, k4, triangle).graph).rows;
    const auto k4_moves = markov_basis(cut_configuration(k4).rows).moves;
    auto all = quad_moves(k4, k4, triangle);
    for (bool second : {false, true}) {
        const auto l = lift_moves(k4_moves, k4, k4, triangle, second);
        all.insert(all.end(), l.begin(), l.end());
    }
    for (const auto& z : all) CHECK(is_in_left_kernel(g10, z));
    CHECK(is_markov_basis(all, g10, 8));

    CHECK(testing::error_of([&] { lift_moves({{1, -1}}, k4, k4, triangle); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("theorem graphs realise one- and two-word designs") {
    auto check = [](std::size_t p, const DefiningRelationSet& rel) {
        const TheoremGraph tg = theorem_graph(p, rel);
        CHECK(tg.graph.n_edges() == p);
        CHECK(tg.graph.is_connected());
        const DesignMatrix d = design_from_relations(p, rel);
        const DesignMatrix dg = design_from_graph(tg.graph);
        // Edge j carries factor j, so equal row sets mean equal designs.
        const auto rows = testing::sorted_rows(d.runs);
        CHECK(rows == testing::sorted_rows(dg.runs));
        CHECK(kernel_equal(model_matrix(DesignMatrix{testing::from_sorted(rows), {}, {}}).columns,
                           model_matrix(DesignMatrix{testing::from_sorted(testing::sorted_rows(dg.runs)), {}, {}})
                               .columns));
    };
    for (std::size_t p = 3; p <= 7; ++p)
        for (std::uint64_t w = 1; w < (std::uint64_t{1} << p); ++w)
            if (std::popcount(w) >= 3) check(p, DefiningRelationSet{{w}});
    check(6, parse_relations("ABDE ACDF"));
    check(6, parse_relations("ABC DEF"));
    check(7, parse_relations("ABCD ABEF"));
    check(5, parse_relations("ABD ACE"));
    check(5, parse_relations("ABCDE"));
    check(4, {});

    CHECK(testing::error_of([] { theorem_graph(7, parse_relations("ABDE ACDF BCDG")); }) ==
          ErrorCode::TooManyRelations);
    CHECK(testing::error_of([] { theorem_graph(4, parse_relations("AB")); }) == ErrorCode::InvalidInput);
}
