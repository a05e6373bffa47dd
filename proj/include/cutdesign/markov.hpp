#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cutdesign/design.hpp"
#include "cutdesign/graph.hpp"
#include "cutdesign/int_matrix.hpp"

namespace cutdesign {

/// A move: an integer vector over the runs in Ker_Z(M').
using Move = IntVector;

/// Half the 1-norm, i.e. the size of the positive part of a balanced move.
int move_degree(const Move& z);
/// Sign chosen so that the first nonzero entry is positive.
Move normalize_move(Move z);

struct MarkovBasis {
    std::vector<Move> moves;
    std::uint64_t configuration_id = 0;

    int max_degree() const;
    /// Moves as rows of an s x k matrix (the 4ti2 layout).
    IntMatrix as_matrix(std::size_t k) const;
};

struct Fiber {
    IntVector target;
    std::vector<IntVector> members;
};

constexpr std::size_t kDefaultFiberCap = 200000;

/// Lattice basis of Ker_Z(M'), k - rank(M) vectors.
std::vector<IntVector> integer_kernel_basis(const IntMatrix& m);

/// All y >= 0 with M'y = M'y0, in lexicographic order. Throws FiberTooLarge.
Fiber enumerate_fiber(const IntMatrix& m, const IntVector& y0, std::size_t cap = kDefaultFiberCap);

/// Graver basis (one representative per +/- pair, normalized, sorted) by
/// completion of a lattice basis.
std::vector<Move> graver_basis(const IntMatrix& m);

struct MarkovOptions {
    std::size_t max_runs = 32;
    std::size_t fiber_cap = kDefaultFiberCap;
};

/// A minimal Markov basis: the Graver basis gives the candidate fibers; in
/// each fiber the elements are grouped into classes that share support
/// (transitively) and the classes are joined by a spanning forest of
/// differences. Moves are normalized and sorted. Throws TooLarge.
MarkovBasis markov_basis(const IntMatrix& m, const MarkovOptions& opts = {});

/// Number of moves any minimal Markov basis has: the sum over fibers of
/// (number of classes - 1). Same computation as markov_basis without
/// choosing representatives.
std::size_t minimal_markov_size(const IntMatrix& m, const MarkovOptions& opts = {});

/// True iff the moves connect every fiber whose elements have total
/// <= total_bound. Throws InvalidMove for a move outside the kernel and
/// FiberTooLarge when a fiber exceeds the cap.
bool is_markov_basis(const std::vector<Move>& moves, const IntMatrix& m, int total_bound,
                     std::size_t cap = kDefaultFiberCap);

/// Primitive kernel moves with degree <= d, normalized and sorted.
std::vector<Move> moves_up_to_degree(const IntMatrix& m, int d);

/// Degree-2 moves of a 0/1/2-sum, indexed by the runs of the glued graph
/// (canonical partition order of k_sum(g1, g2, glue).graph).
std::vector<Move> quad_moves(const Graph& g1, const Graph& g2, const Glue& glue);

/// Lift moves of one part (runs of g1, or of g2 when `from_second`) to the
/// runs of the glued graph.
std::vector<Move> lift_moves(const std::vector<Move>& moves, const Graph& g1, const Graph& g2, const Glue& glue,
                             bool from_second = false);

struct TheoremGraph {
    Graph graph;
    std::vector<int> factor_to_edge;  // factor j -> edge index
};

/// Graph whose cut design has the given 1 or 2 defining words on p factors.
/// Throws TooManyRelations for more than two words.
TheoremGraph theorem_graph(std::size_t p, const DefiningRelationSet& rel);

}  // namespace cutdesign
