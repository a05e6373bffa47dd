#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cutdesign {

struct Edge {
    int u = 0;  // 1-based, u < v
    int v = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Finite simple undirected graph on vertices 1..n. Disconnected graphs can
/// be constructed, but every operation needing connectivity rejects them.
class Graph {
public:
    Graph() = default;
    /// Throws InvalidInput on loops, duplicates or out-of-range endpoints.
    Graph(int n_vertices, std::vector<Edge> edges);

    static Graph complete(int n);
    static Graph cycle(int n);
    static Graph path(int n);

    int n_vertices() const noexcept { return n_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    bool has_edge(int u, int v) const;
    /// Index of {u,v} in the edge list, or -1.
    int edge_index(int u, int v) const;
    /// Neighbours of v in ascending order.
    std::vector<int> neighbors(int v) const;
    int degree(int v) const;
    bool is_connected() const;

    /// Adjacency as one bitmask per vertex (bit v-1 for vertex v).
    std::vector<std::uint32_t> adjacency_masks() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

/// Unordered bipartition A|B of the vertex set, stored by its canonical side:
/// the side that does not contain vertex 1. Bit v-1 stands for vertex v.
struct Partition {
    std::uint32_t side_b = 0;

    /// Position in the canonical run order (ascending side_b).
    std::size_t run_index() const noexcept { return side_b >> 1; }
    bool contains(int v) const noexcept { return (side_b >> (v - 1)) & 1U; }
    /// Canonicalise an arbitrary vertex subset of an n-vertex graph.
    static Partition from_subset(std::uint32_t subset, int n);
    /// Label in the style `3|124`, with `∅` for an empty side.
    std::string label(int n) const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition&, const Partition&) = default;
};

/// A vector over F2 indexed by the edge list, one bit per edge.
using EdgeSet = std::uint64_t;

struct BinarySpace {
    std::vector<EdgeSet> basis;
    std::size_t dimension() const noexcept { return basis.size(); }
};

struct SpanningTreeCycles {
    std::vector<int> tree_edges;     // edge indices, in discovery order
    std::vector<EdgeSet> cycles;     // one per non-tree edge, ascending edge index
    std::vector<int> closing_edges;  // the non-tree edge of each cycle
};

struct BinarySpaces {
    BinarySpace cycle_space;
    BinarySpace cut_space;
};

/// The 2^(n-1) partitions in ascending side_b order; the first is ∅|V.
std::vector<Partition> enumerate_partitions(const Graph& g);

/// Indices of edges crossing the partition, in edge-list order.
std::vector<int> cut_set(const Graph& g, Partition p);
EdgeSet cut_mask(const Graph& g, Partition p);

/// BFS spanning tree from vertex 1 (neighbours ascending) and its
/// fundamental cycles. Throws Disconnected.
SpanningTreeCycles fundamental_cycles(const Graph& g);

BinarySpaces binary_spaces(const Graph& g);

/// F2 rank of a list of bit vectors.
std::size_t f2_rank(std::vector<std::uint64_t> vectors);
/// True when `v` lies in the F2 span of `basis`.
bool f2_in_span(const std::vector<std::uint64_t>& basis, std::uint64_t v);

/// Exhaustive search over deletions and contractions, memoised on
/// canonical forms.
bool has_k4_minor(const Graph& g);

/// True iff the graph decomposes along cut vertices and separating edges
/// into single edges and cycles.
bool is_ring_graph(const Graph& g);

/// Adds vertex n+1 joined to every existing vertex.
Graph suspension(const Graph& g);

/// (vertex of g1, vertex of g2) pairs identifying a common clique.
using Glue = std::vector<std::pair<int, int>>;

struct KSum {
    Graph graph;
    std::vector<int> g2_to_sum;  // 1-based vertex of g2 -> vertex of the sum; index 0 unused
    int k = 0;
};

/// Glue g2 onto g1 along a clique of size 1, 2 or 3. g1 keeps its labels and
/// the remaining vertices of g2 are appended in ascending order. Throws
/// NotAClique or UnsupportedK.
KSum k_sum(const Graph& g1, const Graph& g2, const Glue& glue);

/// Relabel vertices: vertex v becomes perm[v-1] (1-based labels).
Graph relabel(const Graph& g, const std::vector<int>& perm);

/// Isomorphism-invariant code: the lexicographically smallest upper-triangle
/// adjacency bitstring over all vertex orderings compatible with a degree
/// refinement. Internal helper for generation and table matching.
std::uint64_t canonical_code(const Graph& g);
bool isomorphic(const Graph& a, const Graph& b);

/// Connected simple graphs with n vertices and m edges, one per isomorphism
/// class, in ascending canonical_code order. n <= 8.
std::vector<Graph> connected_graphs(int n, int m);

/// Length of the shortest cycle; 0 for forests.
int girth(const Graph& g);

/// Plain text: `n m` then m lines `i j`.
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace cutdesign
