#include "cutdesign/design.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "cutdesign/error.hpp"

namespace cutdesign {

namespace {
constexpr std::string_view kLetters = "ABCDEFGHJKLMNOPQRSTUVWXYZ";
}

std::string factor_letter(std::size_t index) {
    if (index < kLetters.size()) return std::string(1, kLetters[index]);
    return "X" + std::to_string(index + 1);
}

std::uint64_t parse_word(const std::string& letters) {
    std::uint64_t word = 0;
    for (char ch : letters) {
        if (ch == ' ' || ch == '\t' || ch == '\r') continue;
        const auto pos = kLetters.find(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
        if (pos == std::string_view::npos)
            throw Error(ErrorCode::InvalidInput, std::string("not a factor letter: ") + ch);
        const std::uint64_t bit = std::uint64_t{1} << pos;
        if (word & bit) throw Error(ErrorCode::InvalidInput, "repeated factor in word " + letters);
        word |= bit;
    }
    return word;
}

std::string format_word(std::uint64_t word) {
    std::string out;
    for (std::size_t j = 0; j < 64; ++j)
        if ((word >> j) & 1U) out += factor_letter(j);
    return out;
}

DefiningRelationSet parse_relations(const std::string& text) {
    DefiningRelationSet rel;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string token;
        while (tokens >> token) {
            // `D=ABC` is accepted as the word ABCD.
            const auto eq = token.find('=');
            if (eq != std::string::npos) token = token.substr(0, eq) + token.substr(eq + 1);
            if (token == "I") continue;
            rel.words.push_back(parse_word(token));
        }
    }
    return rel;
}

std::vector<std::vector<int>> parse_model_terms(const std::string& model) {
    std::vector<std::vector<int>> out;
    std::istringstream in(model);
    std::string term;
    while (std::getline(in, term, '/')) {
        const std::uint64_t w = parse_word(term);
        if (std::popcount(w) < 2) continue;
        std::vector<int> factors;
        for (int j = 0; j < 64; ++j)
            if ((w >> j) & 1U) factors.push_back(j);
        out.push_back(std::move(factors));
    }
    return out;
}

namespace {

std::string edge_label(const Edge& e) {
    if (e.v < 10) return std::to_string(e.u) + std::to_string(e.v);
    return std::to_string(e.u) + "-" + std::to_string(e.v);
}

void require_connected(const Graph& g) {
    if (!g.is_connected()) throw Error(ErrorCode::Disconnected, "graph is not connected");
}

}  // namespace

DesignMatrix design_from_graph(const Graph& g) {
    require_connected(g);
    const auto parts = enumerate_partitions(g);
    DesignMatrix d;
    d.runs = IntMatrix(parts.size(), g.n_edges(), 1);
    for (std::size_t r = 0; r < parts.size(); ++r) {
        for (int e : cut_set(g, parts[r])) d.runs(r, e) = -1;
        d.run_labels.push_back(parts[r].label(g.n_vertices()));
    }
    for (const auto& e : g.edges()) d.factor_labels.push_back(edge_label(e));
    return d;
}

DefiningRelationSet defining_relations_from_graph(const Graph& g) {
    DefiningRelationSet rel;
    rel.words = fundamental_cycles(g).cycles;
    return rel;
}

DesignMatrix design_from_relations(std::size_t p, const DefiningRelationSet& rel) {
    if (p == 0 || p > 40) throw Error(ErrorCode::TooLarge, "factor count must be in 1..40");
    const std::uint64_t all = p == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p) - 1;
    for (auto w : rel.words) {
        if (w == 0) throw Error(ErrorCode::DependentRelations, "empty word");
        if (w & ~all) throw Error(ErrorCode::InvalidInput, "word " + format_word(w) + " uses a factor beyond p");
    }
    if (f2_rank(rel.words) != rel.words.size())
        throw Error(ErrorCode::DependentRelations, "defining words are dependent over F2");
    if (p - rel.words.size() > 20) throw Error(ErrorCode::TooLarge, "more than 2^20 runs");

    // Reduced row echelon form of the words, then a basis of their null space.
    std::vector<std::uint64_t> rows = rel.words;
    std::vector<int> pivot_of_row;
    std::size_t rank = 0;
    for (std::size_t j = 0; j < p; ++j) {
        const std::uint64_t bit = std::uint64_t{1} << j;
        auto it = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                               [bit](std::uint64_t r) { return r & bit; });
        if (it == rows.end()) continue;
        std::iter_swap(rows.begin() + static_cast<std::ptrdiff_t>(rank), it);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != rank && (rows[i] & bit)) rows[i] ^= rows[rank];
        pivot_of_row.push_back(static_cast<int>(j));
        ++rank;
    }
    std::uint64_t pivots = 0;
    for (int j : pivot_of_row) pivots |= std::uint64_t{1} << j;
    std::vector<std::uint64_t> null_basis;
    for (std::size_t f = 0; f < p; ++f) {
        const std::uint64_t bit = std::uint64_t{1} << f;
        if (pivots & bit) continue;
        std::uint64_t x = bit;
        for (std::size_t i = 0; i < rank; ++i)
            if (rows[i] & bit) x |= std::uint64_t{1} << pivot_of_row[i];
        null_basis.push_back(x);
    }

    // Sort key: factor A is the most significant position, -1 sorts after +1.
    auto key = [p](std::uint64_t x) {
        std::uint64_t k = 0;
        for (std::size_t j = 0; j < p; ++j) k = (k << 1) | ((x >> j) & 1U);
        return k;
    };
    const std::size_t runs = std::size_t{1} << null_basis.size();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> solutions(runs);
    for (std::size_t c = 0; c < runs; ++c) {
        std::uint64_t x = 0;
        for (std::size_t i = 0; i < null_basis.size(); ++i)
            if ((c >> i) & 1U) x ^= null_basis[i];
        solutions[c] = {key(x), x};
    }
    std::sort(solutions.begin(), solutions.end());

    DesignMatrix d;
    d.runs = IntMatrix(runs, p, 1);
    for (std::size_t r = 0; r < runs; ++r) {
        for (std::size_t j = 0; j < p; ++j)
            if ((solutions[r].second >> j) & 1U) d.runs(r, j) = -1;
        d.run_labels.push_back(std::to_string(r + 1));
    }
    for (std::size_t j = 0; j < p; ++j) d.factor_labels.push_back(factor_letter(j));
    return d;
}

ModelMatrix model_matrix(const DesignMatrix& d, const std::vector<std::vector<int>>& interactions) {
    const std::size_t k = d.k(), p = d.p();
    for (auto v : d.runs.data())
        if (v != 1 && v != -1) throw Error(ErrorCode::InvalidInput, "design entries must be +1 or -1");

    std::vector<IntVector> cols;
    cols.emplace_back(k, 1);
    ModelMatrix out;
    for (std::size_t j = 0; j < p; ++j) {
        cols.push_back(d.runs.column(j));
        out.term_labels.push_back(j < d.factor_labels.size() ? d.factor_labels[j] : factor_letter(j));
    }
    const bool letters = std::all_of(out.term_labels.begin(), out.term_labels.end(),
                                     [](const std::string& s) { return s.size() == 1; });

    auto same_up_to_sign = [](const IntVector& a, const IntVector& b) {
        return a == b || std::equal(a.begin(), a.end(), b.begin(), [](auto x, auto y) { return x == -y; });
    };
    for (const auto& term : interactions) {
        std::vector<int> factors = term;
        std::sort(factors.begin(), factors.end());
        if (factors.size() < 2 || std::adjacent_find(factors.begin(), factors.end()) != factors.end())
            throw Error(ErrorCode::InvalidInput, "an interaction needs at least two distinct factors");
        IntVector col(k, 1);
        std::string label;
        for (int f : factors) {
            if (f < 0 || static_cast<std::size_t>(f) >= p)
                throw Error(ErrorCode::InvalidInput, "interaction factor out of range");
            for (std::size_t r = 0; r < k; ++r) col[r] *= d.runs(r, f);
            if (!label.empty() && !letters) label += '*';
            label += out.term_labels[f];
        }
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (same_up_to_sign(col, cols[c]))
                throw Error(ErrorCode::ConfoundedTerm,
                            "interaction " + label + " is confounded with " +
                                (c == 0 ? std::string("the mean") : out.term_labels[c - 1]));
        cols.push_back(std::move(col));
        out.term_labels.push_back(label);
    }

    out.columns = IntMatrix(k, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < k; ++r) out.columns(r, c) = cols[c][r];
    return out;
}

ConfigurationMatrix cut_configuration(const Graph& g) {
    require_connected(g);
    const auto parts = enumerate_partitions(g);
    ConfigurationMatrix h;
    h.rows = IntMatrix(parts.size(), 2 * g.n_edges());
    for (std::size_t r = 0; r < parts.size(); ++r) {
        const EdgeSet cut = cut_mask(g, parts[r]);
        for (std::size_t e = 0; e < g.n_edges(); ++e) h.rows(r, 2 * e + ((cut >> e) & 1U)) = 1;
        h.row_labels.push_back(parts[r].label(g.n_vertices()));
    }
    for (const auto& e : g.edges()) {
        h.col_labels.push_back("t" + edge_label(e));
        h.col_labels.push_back("s" + edge_label(e));
    }
    return h;
}

bool kernel_equal(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "run counts differ");
    const auto ka = left_kernel(a), kb = left_kernel(b);
    if (ka.basis.size() != kb.basis.size()) return false;
    for (const auto& v : ka.basis)
        if (!is_in_left_kernel(b, v)) return false;
    for (const auto& v : kb.basis)
        if (!is_in_left_kernel(a, v)) return false;
    return true;
}

std::optional<int> resolution(const DefiningRelationSet& rel) {
    const std::size_t q = rel.words.size();
    if (q == 0) return std::nullopt;
    if (q > 24) throw Error(ErrorCode::TooLarge, "too many words for exhaustive resolution");
    int best = 64;
    // Gray code walk over the nonzero combinations.
    std::uint64_t word = 0;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << q); ++i) {
        word ^= rel.words[std::countr_zero(i)];
        best = std::min(best, std::popcount(word));
    }
    return best;
}

std::string roman(std::optional<int> r) {
    if (!r) return "∞";
    static const char* numerals[] = {"0", "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"};
    if (*r >= 0 && *r <= 10) return numerals[*r];
    return std::to_string(*r);
}

DesignMatrix read_design(std::istream& in) {
    IntMatrix m = read_4ti2(in);
    bool one_two = true, plus_minus = true;
    for (auto v : m.data()) {
        if (v != 1 && v != 2) one_two = false;
        if (v != 1 && v != -1) plus_minus = false;
    }
    if (!one_two && !plus_minus) throw Error(ErrorCode::InvalidInput, "design levels must be 1/2 or +1/-1");
    if (one_two)
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                if (m(r, c) == 2) m(r, c) = -1;
    DesignMatrix d;
    d.runs = std::move(m);
    for (std::size_t j = 0; j < d.p(); ++j) d.factor_labels.push_back(factor_letter(j));
    for (std::size_t r = 0; r < d.k(); ++r) d.run_labels.push_back(std::to_string(r + 1));
    return d;
}

DesignMatrix read_design_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    return read_design(in);
}

// ---------------------------------------------------------------------------
// Graph search.
//
// The runs of a regular design form a group isomorphic to F2^v and every
// +/-1 column is (up to sign) a character of it, i.e. an element of F2^v.
// A graph on v+1 vertices realises the model iff some linear bijection maps
// the set S of column characters onto the edge characters of the graph.

namespace {

struct CharacterView {
    int v = 0;
    std::vector<std::uint32_t> chars;     // distinct nonzero characters
    std::vector<int> column_char;         // per column: index into chars, -1 for constant
    std::vector<std::uint32_t> run_coords;  // coordinates of each run in F2^v
};

CharacterView characters_of(const IntMatrix& m) {
    const std::size_t k = m.rows();
    if (k == 0 || (k & (k - 1)) != 0) throw Error(ErrorCode::NotRegular, "run count is not a power of two");
    CharacterView view;
    view.v = std::countr_zero(k);

    std::vector<std::size_t> varying;
    bool has_constant = false;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        bool constant = true, signs = true;
        for (std::size_t r = 0; r < k; ++r) {
            if (m(r, c) != m(0, c)) constant = false;
            if (m(r, c) != 1 && m(r, c) != -1) signs = false;
        }
        if (constant) {
            has_constant = has_constant || m(0, c) != 0;
            continue;
        }
        if (!signs) throw Error(ErrorCode::InvalidInput, "non-constant model columns must be +/-1");
        varying.push_back(c);
    }
    if (!has_constant) throw Error(ErrorCode::InvalidInput, "model matrix has no constant column");

    // Row keys relative to run 0.
    std::vector<std::vector<bool>> keys(k, std::vector<bool>(varying.size()));
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t j = 0; j < varying.size(); ++j) keys[r][j] = m(r, varying[j]) != m(0, varying[j]);

    std::map<std::vector<bool>, std::size_t> run_of;
    for (std::size_t r = 0; r < k; ++r)
        if (!run_of.emplace(keys[r], r).second) throw Error(ErrorCode::NotRegular, "repeated run");

    auto xor_keys = [](const std::vector<bool>& a, const std::vector<bool>& b) {
        std::vector<bool> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] != b[i];
        return out;
    };
    // Grow the span one generator at a time, recording coordinates.
    std::map<std::vector<bool>, std::uint32_t> span{{keys[0], 0}};
    std::vector<std::size_t> basis_runs;
    for (std::size_t r = 0; r < k && span.size() < k; ++r) {
        if (span.contains(keys[r])) continue;
        const std::uint32_t bit = 1U << basis_runs.size();
        basis_runs.push_back(r);
        std::vector<std::pair<std::vector<bool>, std::uint32_t>> added;
        for (const auto& [key, coords] : span) added.emplace_back(xor_keys(key, keys[r]), coords | bit);
        for (auto& [key, coords] : added) span.emplace(std::move(key), coords);
    }
    if (span.size() != k) throw Error(ErrorCode::NotRegular, "runs do not form a group");
    view.run_coords.resize(k);
    for (const auto& [key, coords] : span) {
        auto it = run_of.find(key);
        if (it == run_of.end()) throw Error(ErrorCode::NotRegular, "runs do not form a group");
        view.run_coords[it->second] = coords;
    }

    view.column_char.assign(m.cols(), -1);
    for (std::size_t j = 0; j < varying.size(); ++j) {
        std::uint32_t s = 0;
        for (std::size_t i = 0; i < basis_runs.size(); ++i)
            if (keys[basis_runs[i]][j]) s |= 1U << i;
        auto it = std::find(view.chars.begin(), view.chars.end(), s);
        if (it == view.chars.end()) {
            view.chars.push_back(s);
            it = view.chars.end() - 1;
        }
        view.column_char[varying[j]] = static_cast<int>(it - view.chars.begin());
    }
    return view;
}

std::uint32_t edge_character(const Edge& e) {
    std::uint32_t x = 1U << (e.v - 2);
    if (e.u > 1) x |= 1U << (e.u - 2);
    return x;
}

std::pair<std::size_t, std::size_t> small_circuits(const std::vector<std::uint32_t>& s) {
    std::size_t three = 0, four = 0;
    const std::size_t n = s.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c) {
                const std::uint32_t abc = s[a] ^ s[b] ^ s[c];
                if (abc == 0) ++three;
                for (std::size_t d = c + 1; d < n; ++d)
                    if ((abc ^ s[d]) == 0) ++four;
            }
    return {three, four};
}

// Search for a linear bijection T with T(chars) = edge characters of g.
// Returns the edge index of T(chars[i]) for every i.
std::optional<std::vector<int>> match_characters(const std::vector<std::uint32_t>& chars, int v, const Graph& g) {
    std::unordered_map<std::uint32_t, int> edge_of;
    for (std::size_t e = 0; e < g.n_edges(); ++e) edge_of[edge_character(g.edges()[e])] = static_cast<int>(e);

    // Greedy basis of the characters; coordinates by table lookup (v <= 7).
    std::vector<std::uint32_t> basis;
    for (auto s : chars) {
        auto extended = std::vector<std::uint64_t>(basis.begin(), basis.end());
        extended.push_back(s);
        if (f2_rank(extended) == extended.size()) basis.push_back(s);
    }
    if (static_cast<int>(basis.size()) != v) return std::nullopt;
    std::unordered_map<std::uint32_t, std::uint32_t> coord_of;
    for (std::uint32_t c = 0; c < (1U << v); ++c) {
        std::uint32_t x = 0;
        for (int i = 0; i < v; ++i)
            if ((c >> i) & 1U) x ^= basis[i];
        coord_of[x] = c;
    }
    std::vector<std::uint32_t> coords(chars.size());
    for (std::size_t i = 0; i < chars.size(); ++i) coords[i] = coord_of.at(chars[i]);

    std::vector<std::vector<std::size_t>> by_level(v);
    for (std::size_t i = 0; i < chars.size(); ++i) by_level[31 - std::countl_zero(coords[i])].push_back(i);

    std::vector<std::uint32_t> image(v, 0);
    std::vector<int> result(chars.size(), -1);
    std::vector<bool> used(g.n_edges(), false);

    auto assign = [&](auto&& self, int level) -> bool {
        if (level == v) return true;
        for (std::size_t e = 0; e < g.n_edges(); ++e) {
            if (used[e]) continue;
            image[level] = edge_character(g.edges()[e]);
            std::vector<std::size_t> taken;
            bool ok = true;
            for (std::size_t i : by_level[level]) {
                std::uint32_t x = 0;
                for (std::uint32_t c = coords[i]; c; c &= c - 1) x ^= image[std::countr_zero(c)];
                auto it = edge_of.find(x);
                if (it == edge_of.end() || used[it->second]) {
                    ok = false;
                    break;
                }
                used[it->second] = true;
                result[i] = it->second;
                taken.push_back(static_cast<std::size_t>(it->second));
            }
            if (ok && self(self, level + 1)) return true;
            for (auto t : taken) used[t] = false;
        }
        return false;
    };
    if (!assign(assign, 0)) return std::nullopt;
    return result;
}

}  // namespace

std::optional<GraphRealization> graph_search_for_model(const IntMatrix& m, const GraphSearchOptions& opts) {
    const CharacterView view = characters_of(m);
    const int n = view.v + 1;
    if (n > opts.max_vertices || n > 8)
        throw Error(ErrorCode::TooLarge, "graph search limited to " + std::to_string(std::min(opts.max_vertices, 8)) +
                                             " vertices");
    const std::size_t edges = view.chars.size();
    if (edges > static_cast<std::size_t>(n * (n - 1) / 2)) return std::nullopt;
    if (f2_rank({view.chars.begin(), view.chars.end()}) != static_cast<std::size_t>(view.v)) return std::nullopt;

    const auto [tri, quad] = small_circuits(view.chars);
    if (tri == 0 && edges > static_cast<std::size_t>(n * n / 4)) return std::nullopt;  // Mantel

    const auto candidates = connected_graphs(n, static_cast<int>(edges));

    auto try_graph = [&](const Graph& g) -> std::optional<GraphRealization> {
        std::vector<std::uint32_t> ech;
        for (const auto& e : g.edges()) ech.push_back(edge_character(e));
        if (small_circuits(ech) != std::make_pair(tri, quad)) return std::nullopt;
        auto matched = match_characters(view.chars, view.v, g);
        if (!matched) return std::nullopt;

        GraphRealization out;
        out.graph = g;
        out.column_to_edge.assign(m.cols(), -1);
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (view.column_char[c] >= 0) out.column_to_edge[c] = (*matched)[view.column_char[c]];

        // Run with coordinates x sits at the partition whose cut pattern
        // agrees with <s, x> on every character s.
        std::map<std::vector<bool>, std::size_t> run_of_pattern;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            std::vector<bool> pattern(view.chars.size());
            for (std::size_t i = 0; i < view.chars.size(); ++i)
                pattern[i] = std::popcount(view.chars[i] & view.run_coords[r]) & 1;
            run_of_pattern[pattern] = r;
        }
        const auto parts = enumerate_partitions(g);
        for (const auto& part : parts) {
            const EdgeSet cut = cut_mask(g, part);
            std::vector<bool> pattern(view.chars.size());
            for (std::size_t i = 0; i < view.chars.size(); ++i) pattern[i] = (cut >> (*matched)[i]) & 1U;
            auto it = run_of_pattern.find(pattern);
            if (it == run_of_pattern.end()) return std::nullopt;
            out.partition_to_run.push_back(it->second);
        }
        const IntMatrix reordered = m.with_rows_permuted(out.partition_to_run);
        if (!kernel_equal(cut_configuration(g).rows, reordered)) return std::nullopt;
        return out;
    };

    const unsigned threads = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(candidates.size())));
    if (threads <= 1) {
        for (const auto& g : candidates)
            if (auto hit = try_graph(g)) return hit;
        return std::nullopt;
    }

    // Workers claim indices in order; the lowest-index hit wins.
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> best{candidates.size()};
    std::vector<std::optional<GraphRealization>> hits(candidates.size());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= candidates.size() || i > best.load()) return;
                hits[i] = try_graph(candidates[i]);
                if (hits[i]) {
                    std::size_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                }
            }
        });
    for (auto& th : pool) th.join();
    if (best.load() == candidates.size()) return std::nullopt;
    return hits[best.load()];
}

// ---------------------------------------------------------------------------
// Classification tables.

namespace {

ModelSpec spec(std::string index, std::string design, std::size_t p, const std::string& words, std::string model) {
    return ModelSpec{std::move(index), std::move(design), p, parse_relations(words), std::move(model)};
}

Graph letters_graph(std::initializer_list<const char*> edges) {
    std::vector<Edge> list;
    for (const char* e : edges) list.push_back({e[0] - 'a' + 1, e[1] - 'a' + 1});
    int n = 0;
    for (const auto& e : list) n = std::max({n, e.u, e.v});
    return Graph(n, std::move(list));
}

}  // namespace

std::vector<ModelSpec> models_8runs() {
    const std::string d4 = "2^(4-1)", d5 = "2^(5-2)", d6 = "2^(6-3)";
    return {
        spec("[1]", d4, 4, "ABCD", "A/B/C/D"),
        spec("[2]", d4, 4, "ABCD", "AB/C/D"),
        spec("[3]", d4, 4, "ABCD", "AB/AC/D"),
        spec("[4]", d5, 5, "ABD ACE", "A/B/C/D/E"),
        spec("[5]", d5, 5, "ABD ACE", "A/BC/D/E"),
        spec("[6]", d6, 6, "ABD ACE BCF", "A/B/C/D/E/F"),
    };
}

std::vector<ModelSpec> models_16runs() {
    const std::string d5 = "2^(5-1)", d6 = "2^(6-2)";
    const std::string w5 = "ABCDE", w6 = "ABCE ABDF";
    return {
        spec("[5-1]", d5, 5, w5, "A/B/C/D/E"),
        spec("[5-2]", d5, 5, w5, "AB/C/D/E"),
        spec("[5-3]", d5, 5, w5, "AB/AC/D/E"),
        spec("[5-4]", d5, 5, w5, "AB/CD/E"),
        spec("[5-5]", d5, 5, w5, "AB/AC/BD/E"),
        spec("[5-6]", d5, 5, w5, "AB/AC/DE"),
        spec("", d5, 5, w5, "AB/AC/AD/E"),
        spec("", d5, 5, w5, "AB/AC/BC/D/E"),
        spec("[5-7]", d5, 5, w5, "AB/AC/BD/CE"),
        spec("", d5, 5, w5, "AB/AC/BD/CD"),
        spec("[5-8]", d5, 5, w5, "AB/AC/BD/CE/DE"),
        spec("[6-1]", d6, 6, w6, "A/B/C/D/E/F"),
        spec("[6-2]", d6, 6, w6, "AB/C/D/E/F"),
        spec("[6-3]", d6, 6, w6, "AC/B/D/E/F"),
        spec("[6-4]", d6, 6, w6, "AB/AC/D/E/F"),
        spec("[6-5]", d6, 6, w6, "AB/CD/E/F"),
        spec("[6-6]", d6, 6, w6, "AB/AC/AD/E/F"),
        spec("[6-7]", d6, 6, w6, "AB/AD/BC/E/F"),
        spec("[6-8]", d6, 6, w6, "AB/AC/CD/E/F"),
        spec("[6-9]", d6, 6, w6, "AB/AC/DE/F"),
        spec("[6-10]", d6, 6, w6, "AC/BD/EF"),
        spec("", d6, 6, w6, "AB/AC/AE/D/F"),
        spec("", d6, 6, w6, "AB/AC/BC/D/E/F"),
        spec("[6-11]", d6, 6, w6, "AB/AC/AD/CD/E/F"),
        spec("[6-12]", d6, 6, w6, "AD/DE/DF/BC"),
        spec("[6-13]", d6, 6, w6, "AD/BC/CF/DF/E"),
        spec("", d6, 6, w6, "AC/AD/CD/CF/B/E"),
        spec("", d6, 6, w6, "AB/AC/CF/CD/E"),
        spec("", d6, 6, w6, "AC/BD/CD/CF/E"),
        spec("", d6, 6, w6, "AC/BC/AD/AF/E"),
        spec("", d6, 6, w6, "AB/AC/AD/CF/E"),
        spec("", d6, 6, w6, "AC/AD/BC/DF/E"),
        spec("", d6, 6, w6, "AB/BC/AD/EF"),
        spec("", d6, 6, w6, "AD/BC/BD/EF"),
        spec("", d6, 6, w6, "AD/BC/BE/DF"),
        spec("", d6, 6, w6, "AD/AF/BC/BE"),
    };
}

std::vector<std::pair<std::string, Graph>> reference_graphs_8runs() {
    return {
        {"C4", letters_graph({"ab", "ac", "bd", "cd"})},
        {"K4-e", letters_graph({"ab", "ac", "bd", "cd", "bc"})},
        {"K4", Graph::complete(4)},
    };
}

std::vector<std::pair<std::string, Graph>> reference_graphs_16runs() {
    // Vertices a..e are 1..5, read off the drawings.
    return {
        {"G1", letters_graph({"ab", "ac", "bd", "ce", "de"})},
        {"G2", letters_graph({"ab", "ac", "bd", "cd", "ce", "de"})},
        {"G3", letters_graph({"ab", "ac", "bd", "be", "cd", "ce"})},
        {"G4", letters_graph({"ab", "ac", "bd", "be", "cd", "ce", "de"})},
        {"G5", letters_graph({"ab", "ac", "bc", "bd", "cd", "ce", "de"})},
        {"G6", letters_graph({"ab", "ac", "bc", "bd", "be", "cd", "ce"})},
        {"G7", letters_graph({"ab", "ac", "ad", "bd", "be", "cd", "ce"})},
        {"G8", letters_graph({"ab", "ac", "ad", "bc", "bd", "be", "ce", "de"})},
        {"G9", letters_graph({"ab", "ac", "ad", "bc", "bd", "cd", "ce", "de"})},
        {"G10", letters_graph({"ab", "ac", "ad", "ae", "bc", "bd", "be", "ce", "de"})},
        {"G11", Graph::complete(5)},
    };
}

std::vector<ClassifyRow> classify(const std::vector<ModelSpec>& models,
                                  const std::vector<std::pair<std::string, Graph>>& named,
                                  const GraphSearchOptions& opts) {
    std::vector<ClassifyRow> rows;
    for (const auto& s : models) {
        ClassifyRow row;
        row.spec = s;
        const ModelMatrix mm = model_matrix(design_from_relations(s.p, s.relations), parse_model_terms(s.model));
        const auto hit = graph_search_for_model(mm.columns, opts);
        if (hit) {
            row.graph = hit->graph;
            for (const auto& [name, g] : named)
                if (!row.graph_name && isomorphic(g, hit->graph)) row.graph_name = name;
            if (!row.graph_name) row.graph_name = "unlisted graph";
            const IntMatrix reordered = mm.columns.with_rows_permuted(hit->partition_to_run);
            row.verified = kernel_equal(cut_configuration(hit->graph).rows, reordered);
        } else {
            row.verified = true;  // exhausted search
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_classification(const std::vector<ClassifyRow>& rows,
                                  const std::vector<std::pair<std::string, Graph>>& named) {
    std::ostringstream out;
    for (const auto& [name, g] : named) {
        std::string models;
        for (const auto& row : rows)
            if (row.graph_name == name) models += row.spec.index.empty() ? "(" + row.spec.model + ")" : row.spec.index;
        out << name << ": " << (models.empty() ? "-" : models) << '\n';
    }
    for (const auto& row : rows) {
        if (row.graph_name && std::none_of(named.begin(), named.end(),
                                           [&](const auto& p) { return p.first == *row.graph_name; }))
            out << *row.graph_name << ": " << row.spec.design_name << ' ' << row.spec.model << '\n';
    }
    for (const auto& row : rows)
        if (!row.graph_name)
            out << "no graph: " << row.spec.design_name << ' ' << row.spec.model
                << (row.spec.index.empty() ? "" : " " + row.spec.index) << '\n';
    return out.str();
}

std::vector<std::string> compare_classification(const std::vector<ClassifyRow>& rows,
                                                const std::vector<std::pair<std::string, Graph>>& named,
                                                const std::string& expected) {
    std::map<std::string, std::string> expected_graph;  // model index -> graph name
    std::istringstream in(expected);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos || line.rfind("no graph", 0) == 0 || line[0] == '#') continue;
        const std::string name = line.substr(0, colon);
        for (std::size_t pos = line.find('[', colon); pos != std::string::npos; pos = line.find('[', pos + 1)) {
            const auto close = line.find(']', pos);
            if (close == std::string::npos) break;
            expected_graph[line.substr(pos, close - pos + 1)] = name;
        }
    }

    std::vector<std::string> mismatches;
    for (const auto& row : rows) {
        const std::string who = (row.spec.index.empty() ? "" : row.spec.index + " ") + row.spec.design_name + " " +
                                row.spec.model;
        auto it = row.spec.index.empty() ? expected_graph.end() : expected_graph.find(row.spec.index);
        if (it == expected_graph.end()) {
            if (row.graph) mismatches.push_back(who + ": expected no graph, found " + *row.graph_name);
            continue;
        }
        if (!row.graph) {
            mismatches.push_back(who + ": expected " + it->second + ", search exhausted without a graph");
            continue;
        }
        auto ref = std::find_if(named.begin(), named.end(), [&](const auto& p) { return p.first == it->second; });
        if (ref == named.end() || !isomorphic(ref->second, *row.graph))
            mismatches.push_back(who + ": expected " + it->second + ", found " + *row.graph_name);
    }
    return mismatches;
}

}  // namespace cutdesign
