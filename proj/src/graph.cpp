#include "cutdesign/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <unordered_set>

#include "cutdesign/error.hpp"

namespace cutdesign {

Graph::Graph(int n_vertices, std::vector<Edge> edges) : n_(n_vertices), edges_(std::move(edges)) {
    if (n_ < 1 || n_ > 31) throw Error(ErrorCode::InvalidInput, "vertex count must be in 1..31");
    if (edges_.size() > 64) throw Error(ErrorCode::InvalidInput, "at most 64 edges are supported");
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.u == e.v) throw Error(ErrorCode::InvalidInput, "loop at vertex " + std::to_string(e.u));
        if (e.u < 1 || e.v > n_) throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
        if (!seen.insert({e.u, e.v}).second)
            throw Error(ErrorCode::InvalidInput,
                        "duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
}

Graph Graph::complete(int n) {
    std::vector<Edge> edges;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
    return Graph(n, std::move(edges));
}

Graph Graph::cycle(int n) {
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i) edges.push_back({i, i + 1});
    edges.push_back({1, n});
    return Graph(n, std::move(edges));
}

Graph Graph::path(int n) {
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i) edges.push_back({i, i + 1});
    return Graph(n, std::move(edges));
}

bool Graph::has_edge(int u, int v) const { return edge_index(u, v) >= 0; }

int Graph::edge_index(int u, int v) const {
    if (u > v) std::swap(u, v);
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].u == u && edges_[i].v == v) return static_cast<int>(i);
    return -1;
}

std::vector<int> Graph::neighbors(int v) const {
    std::vector<int> out;
    for (const auto& e : edges_) {
        if (e.u == v) out.push_back(e.v);
        if (e.v == v) out.push_back(e.u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int Graph::degree(int v) const { return static_cast<int>(neighbors(v).size()); }

std::vector<std::uint32_t> Graph::adjacency_masks() const {
    std::vector<std::uint32_t> adj(n_, 0);
    for (const auto& e : edges_) {
        adj[e.u - 1] |= 1U << (e.v - 1);
        adj[e.v - 1] |= 1U << (e.u - 1);
    }
    return adj;
}

namespace {

bool connected_within(const std::vector<std::uint32_t>& adj, std::uint32_t alive) {
    if (alive == 0) return true;
    std::uint32_t seen = alive & (~alive + 1);
    std::uint32_t frontier = seen;
    while (frontier) {
        std::uint32_t next = 0;
        for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
        next &= alive & ~seen;
        seen |= next;
        frontier = next;
    }
    return seen == alive;
}

std::vector<std::uint32_t> components_within(const std::vector<std::uint32_t>& adj, std::uint32_t alive) {
    std::vector<std::uint32_t> out;
    std::uint32_t rest = alive;
    while (rest) {
        std::uint32_t seen = rest & (~rest + 1);
        std::uint32_t frontier = seen;
        while (frontier) {
            std::uint32_t next = 0;
            for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
            next &= alive & ~seen;
            seen |= next;
            frontier = next;
        }
        out.push_back(seen);
        rest &= ~seen;
    }
    return out;
}

std::uint32_t full_mask(int n) { return n >= 32 ? ~0U : ((1U << n) - 1U); }

}  // namespace

bool Graph::is_connected() const { return connected_within(adjacency_masks(), full_mask(n_)); }

Partition Partition::from_subset(std::uint32_t subset, int n) {
    subset &= full_mask(n);
    if (subset & 1U) subset = full_mask(n) & ~subset;
    return Partition{subset};
}

std::string Partition::label(int n) const {
    auto side = [n](std::uint32_t mask) {
        if (mask == 0) return std::string("∅");
        std::string s;
        for (int v = 1; v <= n; ++v) {
            if (!((mask >> (v - 1)) & 1U)) continue;
            if (!s.empty() && n >= 10) s += ',';
            s += std::to_string(v);
        }
        return s;
    };
    return side(side_b) + "|" + side(full_mask(n) & ~side_b);
}

std::vector<Partition> enumerate_partitions(const Graph& g) {
    const std::size_t count = std::size_t{1} << (g.n_vertices() - 1);
    std::vector<Partition> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i].side_b = static_cast<std::uint32_t>(i << 1);
    return out;
}

EdgeSet cut_mask(const Graph& g, Partition p) {
    EdgeSet mask = 0;
    const auto& edges = g.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (p.contains(edges[i].u) != p.contains(edges[i].v)) mask |= EdgeSet{1} << i;
    return mask;
}

std::vector<int> cut_set(const Graph& g, Partition p) {
    std::vector<int> out;
    const EdgeSet mask = cut_mask(g, p);
    for (std::size_t i = 0; i < g.n_edges(); ++i)
        if ((mask >> i) & 1U) out.push_back(static_cast<int>(i));
    return out;
}

SpanningTreeCycles fundamental_cycles(const Graph& g) {
    if (!g.is_connected()) throw Error(ErrorCode::Disconnected, "graph is not connected");
    const int n = g.n_vertices();
    std::vector<int> parent(n + 1, 0), parent_edge(n + 1, -1), depth(n + 1, -1);
    std::vector<bool> in_tree(g.n_edges(), false);
    SpanningTreeCycles out;

    std::queue<int> queue;
    queue.push(1);
    depth[1] = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop();
        for (int w : g.neighbors(u)) {
            if (depth[w] >= 0) continue;
            depth[w] = depth[u] + 1;
            parent[w] = u;
            parent_edge[w] = g.edge_index(u, w);
            in_tree[parent_edge[w]] = true;
            out.tree_edges.push_back(parent_edge[w]);
            queue.push(w);
        }
    }

    for (std::size_t i = 0; i < g.n_edges(); ++i) {
        if (in_tree[i]) continue;
        EdgeSet cycle = EdgeSet{1} << i;
        int a = g.edges()[i].u, b = g.edges()[i].v;
        while (a != b) {
            if (depth[a] < depth[b]) std::swap(a, b);
            cycle ^= EdgeSet{1} << parent_edge[a];
            a = parent[a];
        }
        out.cycles.push_back(cycle);
        out.closing_edges.push_back(static_cast<int>(i));
    }
    return out;
}

BinarySpaces binary_spaces(const Graph& g) {
    BinarySpaces out;
    out.cycle_space.basis = fundamental_cycles(g).cycles;
    for (int v = 2; v <= g.n_vertices(); ++v)
        out.cut_space.basis.push_back(cut_mask(g, Partition{1U << (v - 1)}));
    return out;
}

std::size_t f2_rank(std::vector<std::uint64_t> vectors) {
    std::size_t rank = 0;
    for (int bit = 63; bit >= 0; --bit) {
        auto pivot = std::find_if(vectors.begin() + static_cast<std::ptrdiff_t>(rank), vectors.end(),
                                  [bit](std::uint64_t v) { return (v >> bit) & 1U; });
        if (pivot == vectors.end()) continue;
        std::iter_swap(vectors.begin() + static_cast<std::ptrdiff_t>(rank), pivot);
        for (std::size_t i = 0; i < vectors.size(); ++i)
            if (i != rank && ((vectors[i] >> bit) & 1U)) vectors[i] ^= vectors[rank];
        ++rank;
    }
    return rank;
}

bool f2_in_span(const std::vector<std::uint64_t>& basis, std::uint64_t v) {
    auto extended = basis;
    extended.push_back(v);
    return f2_rank(extended) == f2_rank(basis);
}

// ---------------------------------------------------------------------------
// Small graphs as adjacency bitmasks.

namespace {

struct SmallGraph {
    int n = 0;
    std::vector<std::uint32_t> adj;

    int edges() const {
        int total = 0;
        for (auto a : adj) total += std::popcount(a);
        return total / 2;
    }
};

SmallGraph to_small(const Graph& g) { return {g.n_vertices(), g.adjacency_masks()}; }

Graph from_small(const SmallGraph& s) {
    std::vector<Edge> edges;
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j)
            if ((s.adj[i] >> j) & 1U) edges.push_back({i + 1, j + 1});
    return Graph(std::max(s.n, 1), std::move(edges));
}

// Keep only the vertices in `keep`, relabelled in ascending order.
SmallGraph induced(const SmallGraph& g, std::uint32_t keep) {
    std::vector<int> index(g.n, -1);
    int next = 0;
    for (int v = 0; v < g.n; ++v)
        if ((keep >> v) & 1U) index[v] = next++;
    SmallGraph out{next, std::vector<std::uint32_t>(next, 0)};
    for (int v = 0; v < g.n; ++v) {
        if (index[v] < 0) continue;
        for (std::uint32_t a = g.adj[v] & keep; a; a &= a - 1) out.adj[index[v]] |= 1U << index[std::countr_zero(a)];
    }
    return out;
}

std::uint64_t code_for_order(const SmallGraph& g, const std::vector<int>& order) {
    // Bits read pairs (0,1),(0,2),...,(1,2),... most significant first, so
    // that a smaller code means "fewer edges early".
    std::uint64_t code = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) code = (code << 1) | ((g.adj[order[i]] >> order[j]) & 1U);
    return code;
}

std::uint64_t canonical_small(const SmallGraph& g, std::vector<int>* best_order = nullptr) {
    const int n = g.n;
    // Refine vertices by (degree, sorted neighbour degrees).
    std::vector<std::pair<std::vector<int>, int>> keyed(n);
    for (int v = 0; v < n; ++v) {
        std::vector<int> key{std::popcount(g.adj[v])};
        std::vector<int> nd;
        for (std::uint32_t a = g.adj[v]; a; a &= a - 1) nd.push_back(std::popcount(g.adj[std::countr_zero(a)]));
        std::sort(nd.begin(), nd.end());
        key.insert(key.end(), nd.begin(), nd.end());
        keyed[v] = {std::move(key), v};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order(n);
    std::vector<std::pair<int, int>> blocks;  // [begin, end) of equal keys
    for (int i = 0; i < n;) {
        int j = i;
        while (j < n && keyed[j].first == keyed[i].first) ++j;
        blocks.push_back({i, j});
        i = j;
    }
    for (int i = 0; i < n; ++i) order[i] = keyed[i].second;

    std::uint64_t best = ~std::uint64_t{0};
    std::vector<int> best_seen;
    // Iterate over the product of permutations of every block.
    for (auto& [b, e] : blocks) std::sort(order.begin() + b, order.begin() + e);
    while (true) {
        const std::uint64_t code = code_for_order(g, order);
        if (code < best) {
            best = code;
            best_seen = order;
        }
        std::size_t bi = blocks.size();
        bool advanced = false;
        while (bi-- > 0) {
            auto [b, e] = blocks[bi];
            if (std::next_permutation(order.begin() + b, order.begin() + e)) {
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    if (best_order) *best_order = best_seen;
    return (static_cast<std::uint64_t>(n) << 58) | best;
}

SmallGraph from_code(int n, std::uint64_t code) {
    SmallGraph g{n, std::vector<std::uint32_t>(n, 0)};
    const int pairs = n * (n - 1) / 2;
    int bit = pairs - 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, --bit)
            if ((code >> bit) & 1U) {
                g.adj[i] |= 1U << j;
                g.adj[j] |= 1U << i;
            }
    return g;
}

bool contains_k4_subgraph(const SmallGraph& g) {
    for (int a = 0; a < g.n; ++a)
        for (std::uint32_t rb = g.adj[a] & ~((2U << a) - 1); rb; rb &= rb - 1) {
            const int b = std::countr_zero(rb);
            const std::uint32_t common = g.adj[a] & g.adj[b] & ~((2U << b) - 1);
            for (std::uint32_t rc = common; rc; rc &= rc - 1) {
                const int c = std::countr_zero(rc);
                if (common & g.adj[c]) return true;
            }
        }
    return false;
}

SmallGraph contract(const SmallGraph& g, int a, int b) {
    // Merge b into a, then drop b.
    SmallGraph m = g;
    m.adj[a] |= m.adj[b];
    for (int v = 0; v < m.n; ++v)
        if ((m.adj[v] >> b) & 1U) m.adj[v] |= 1U << a;
    m.adj[a] &= ~((1U << a) | (1U << b));
    for (int v = 0; v < m.n; ++v) m.adj[v] &= ~(1U << v);
    return induced(m, full_mask(m.n) & ~(1U << b));
}

SmallGraph prune_low_degree(SmallGraph g) {
    while (true) {
        std::uint32_t keep = full_mask(g.n);
        for (int v = 0; v < g.n; ++v)
            if (std::popcount(g.adj[v]) <= 1) keep &= ~(1U << v);
        if (keep == full_mask(g.n)) return g;
        g = induced(g, keep);
    }
}

bool k4_minor_search(const SmallGraph& raw, std::unordered_set<std::uint64_t>& known_free) {
    const SmallGraph g = prune_low_degree(raw);
    if (g.n < 4 || g.edges() < 6) return false;
    if (contains_k4_subgraph(g)) return true;
    const std::uint64_t code = canonical_small(g);
    if (known_free.contains(code)) return false;
    for (int a = 0; a < g.n; ++a)
        for (std::uint32_t rb = g.adj[a] & ~((2U << a) - 1); rb; rb &= rb - 1) {
            const int b = std::countr_zero(rb);
            if (k4_minor_search(contract(g, a, b), known_free)) return true;
            SmallGraph deleted = g;
            deleted.adj[a] &= ~(1U << b);
            deleted.adj[b] &= ~(1U << a);
            if (k4_minor_search(deleted, known_free)) return true;
        }
    known_free.insert(code);
    return false;
}

bool is_cycle(const SmallGraph& g) {
    for (auto a : g.adj)
        if (std::popcount(a) != 2) return false;
    return connected_within(g.adj, full_mask(g.n));
}

bool ring_decompose(const SmallGraph& g) {
    const std::uint32_t all = full_mask(g.n);
    if (g.n <= 2) return true;  // single vertex or single edge
    if (is_cycle(g)) return true;
    for (int v = 0; v < g.n; ++v) {
        const auto parts = components_within(g.adj, all & ~(1U << v));
        if (parts.size() < 2) continue;
        for (auto part : parts)
            if (!ring_decompose(induced(g, part | (1U << v)))) return false;
        return true;
    }
    for (int a = 0; a < g.n; ++a)
        for (std::uint32_t rb = g.adj[a] & ~((2U << a) - 1); rb; rb &= rb - 1) {
            const int b = std::countr_zero(rb);
            const std::uint32_t pair = (1U << a) | (1U << b);
            const auto parts = components_within(g.adj, all & ~pair);
            if (parts.size() < 2) continue;
            for (auto part : parts)
                if (!ring_decompose(induced(g, part | pair))) return false;
            return true;
        }
    return false;
}

}  // namespace

bool has_k4_minor(const Graph& g) {
    std::unordered_set<std::uint64_t> known_free;
    // Components are independent; the search handles disconnected input as is.
    return k4_minor_search(to_small(g), known_free);
}

bool is_ring_graph(const Graph& g) {
    if (!g.is_connected()) throw Error(ErrorCode::Disconnected, "graph is not connected");
    return ring_decompose(to_small(g));
}

Graph suspension(const Graph& g) {
    auto edges = g.edges();
    const int apex = g.n_vertices() + 1;
    for (int v = 1; v < apex; ++v) edges.push_back({v, apex});
    return Graph(apex, std::move(edges));
}

KSum k_sum(const Graph& g1, const Graph& g2, const Glue& glue) {
    if (glue.empty() || glue.size() > 3)
        throw Error(ErrorCode::UnsupportedK, "only 0-, 1- and 2-sums (cliques of size 1..3) are supported");
    std::set<int> left, right;
    for (auto [a, b] : glue) {
        if (a < 1 || a > g1.n_vertices() || b < 1 || b > g2.n_vertices())
            throw Error(ErrorCode::InvalidInput, "glue vertex out of range");
        if (!left.insert(a).second || !right.insert(b).second)
            throw Error(ErrorCode::InvalidInput, "glue map is not injective");
    }
    for (std::size_t i = 0; i < glue.size(); ++i)
        for (std::size_t j = i + 1; j < glue.size(); ++j) {
            if (!g1.has_edge(glue[i].first, glue[j].first) || !g2.has_edge(glue[i].second, glue[j].second))
                throw Error(ErrorCode::NotAClique, "glued vertices do not form a clique in both graphs");
        }

    KSum out;
    out.k = static_cast<int>(glue.size()) - 1;
    out.g2_to_sum.assign(g2.n_vertices() + 1, 0);
    for (auto [a, b] : glue) out.g2_to_sum[b] = a;
    int next = g1.n_vertices();
    for (int v = 1; v <= g2.n_vertices(); ++v)
        if (out.g2_to_sum[v] == 0) out.g2_to_sum[v] = ++next;

    auto edges = g1.edges();
    for (const auto& e : g2.edges()) {
        Edge mapped{out.g2_to_sum[e.u], out.g2_to_sum[e.v]};
        if (mapped.u > mapped.v) std::swap(mapped.u, mapped.v);
        if (std::find(edges.begin(), edges.end(), mapped) == edges.end()) edges.push_back(mapped);
    }
    out.graph = Graph(next, std::move(edges));
    return out;
}

Graph relabel(const Graph& g, const std::vector<int>& perm) {
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) edges.push_back({perm[e.u - 1], perm[e.v - 1]});
    return Graph(g.n_vertices(), std::move(edges));
}

std::uint64_t canonical_code(const Graph& g) {
    if (g.n_vertices() > 11) throw Error(ErrorCode::TooLarge, "canonical form limited to 11 vertices");
    return canonical_small(to_small(g));
}

bool isomorphic(const Graph& a, const Graph& b) {
    return a.n_vertices() == b.n_vertices() && a.n_edges() == b.n_edges() && canonical_code(a) == canonical_code(b);
}

std::vector<Graph> connected_graphs(int n, int m) {
    if (n < 1 || n > 8) throw Error(ErrorCode::TooLarge, "graph enumeration limited to 8 vertices");
    if (m < 0 || m > n * (n - 1) / 2) return {};
    std::set<std::uint64_t> level{canonical_small(SmallGraph{n, std::vector<std::uint32_t>(n, 0)})};
    const std::uint64_t low = (std::uint64_t{1} << 58) - 1;
    for (int e = 0; e < m; ++e) {
        std::set<std::uint64_t> next;
        for (auto code : level) {
            const SmallGraph g = from_code(n, code & low);
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    if ((g.adj[a] >> b) & 1U) continue;
                    SmallGraph h = g;
                    h.adj[a] |= 1U << b;
                    h.adj[b] |= 1U << a;
                    next.insert(canonical_small(h));
                }
        }
        level = std::move(next);
    }
    std::vector<Graph> out;
    for (auto code : level) {
        const SmallGraph g = from_code(n, code & low);
        if (connected_within(g.adj, full_mask(n))) out.push_back(from_small(g));
    }
    return out;
}

int girth(const Graph& g) {
    const int n = g.n_vertices();
    int best = 0;
    for (int s = 1; s <= n; ++s) {
        std::vector<int> dist(n + 1, -1), parent(n + 1, 0);
        std::queue<int> queue;
        dist[s] = 0;
        queue.push(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop();
            for (int w : g.neighbors(u)) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push(w);
                } else if (parent[u] != w) {
                    const int len = dist[u] + dist[w] + 1;
                    if (best == 0 || len < best) best = len;
                }
            }
        }
    }
    return best;
}

Graph read_graph(std::istream& in) {
    int n = 0;
    std::size_t m = 0;
    if (!(in >> n >> m)) throw Error(ErrorCode::InvalidInput, "missing graph header `n m`");
    std::vector<Edge> edges(m);
    for (auto& e : edges)
        if (!(in >> e.u >> e.v)) throw Error(ErrorCode::InvalidInput, "graph file truncated");
    return Graph(n, std::move(edges));
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
    out << g.n_vertices() << ' ' << g.n_edges() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace cutdesign
