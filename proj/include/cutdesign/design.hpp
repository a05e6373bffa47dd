#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cutdesign/graph.hpp"
#include "cutdesign/int_matrix.hpp"

namespace cutdesign {

/// k x p matrix of +1/-1 levels.
struct DesignMatrix {
    IntMatrix runs;
    std::vector<std::string> factor_labels;
    std::vector<std::string> run_labels;

    std::size_t k() const noexcept { return runs.rows(); }
    std::size_t p() const noexcept { return runs.cols(); }
};

/// [1 | D | interaction products]. term_labels has one entry per
/// non-constant column.
struct ModelMatrix {
    IntMatrix columns;
    std::vector<std::string> term_labels;

    std::size_t k() const noexcept { return columns.rows(); }
};

/// Factor subsets as bitmasks (bit j = factor j); each word's product is +1.
struct DefiningRelationSet {
    std::vector<std::uint64_t> words;
};

struct ConfigurationMatrix {
    IntMatrix rows;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

/// A..H, J, K, ... (I is skipped).
std::string factor_letter(std::size_t index);
std::uint64_t parse_word(const std::string& letters);
std::string format_word(std::uint64_t word);
/// Lines of factor letters, one word per line; blank lines and `#` ignored.
DefiningRelationSet parse_relations(const std::string& text);
/// Model in the slash notation, e.g. `AB/AC/D/E`. Main effects of all factors
/// are always present; the result lists only the interaction subsets.
std::vector<std::vector<int>> parse_model_terms(const std::string& model);

DesignMatrix design_from_graph(const Graph& g);
DefiningRelationSet defining_relations_from_graph(const Graph& g);
/// All sign vectors satisfying the words, +1 before -1 in lexicographic
/// order. Throws DependentRelations.
DesignMatrix design_from_relations(std::size_t p, const DefiningRelationSet& rel);
/// Throws ConfoundedTerm when a product equals +/- an existing column.
ModelMatrix model_matrix(const DesignMatrix& d, const std::vector<std::vector<int>>& interactions = {});
ConfigurationMatrix cut_configuration(const Graph& g);

/// Ker_Z(a') == Ker_Z(b'). Throws ShapeMismatch on differing run counts.
bool kernel_equal(const IntMatrix& a, const IntMatrix& b);

/// Minimum word length of the defining contrast group; nullopt for q = 0.
std::optional<int> resolution(const DefiningRelationSet& rel);
std::string roman(std::optional<int> r);

/// Read a design table; levels 1/2 are recoded with 2 -> -1.
DesignMatrix read_design(std::istream& in);
DesignMatrix read_design_file(const std::string& path);

struct GraphRealization {
    Graph graph;
    std::vector<int> column_to_edge;          // non-constant column j -> edge index
    std::vector<std::size_t> partition_to_run;  // run index of each canonical partition
};

struct GraphSearchOptions {
    int max_vertices = 7;
    unsigned threads = 1;
};

/// Connected graph with log2(k)+1 vertices whose cut configuration has the
/// same integer kernel as m, up to relabelling of runs and columns. The first
/// hit in canonical enumeration order is returned and re-verified with
/// kernel_equal. Throws NotRegular when the runs are not a coset of a group
/// and TooLarge beyond max_vertices.
std::optional<GraphRealization> graph_search_for_model(const IntMatrix& m, const GraphSearchOptions& opts = {});

struct ModelSpec {
    std::string index;  // e.g. "[5-3]"; empty for unindexed models
    std::string design_name;
    std::size_t p = 0;
    DefiningRelationSet relations;
    std::string model;
};

/// The classified models for the 8-run and 16-run designs.
std::vector<ModelSpec> models_8runs();
std::vector<ModelSpec> models_16runs();
/// Named reference graphs: C4, K4-e, K4 and G1..G11.
std::vector<std::pair<std::string, Graph>> reference_graphs_8runs();
std::vector<std::pair<std::string, Graph>> reference_graphs_16runs();

struct ClassifyRow {
    ModelSpec spec;
    std::optional<Graph> graph;             // nullopt = no graph
    std::optional<std::string> graph_name;  // first isomorphic named graph
    bool verified = false;                  // kernel_equal certificate or exhausted search
};

std::vector<ClassifyRow> classify(const std::vector<ModelSpec>& models,
                                  const std::vector<std::pair<std::string, Graph>>& named,
                                  const GraphSearchOptions& opts = {});
/// Graph -> models listing in the layout of the bundled expected files.
std::string format_classification(const std::vector<ClassifyRow>& rows,
                                  const std::vector<std::pair<std::string, Graph>>& named);

/// Compare against an expected listing (`Name: [i][j]` lines). A model is
/// expected to have a graph iff its index appears on some line, and the found
/// graph must be isomorphic to the named one. Returns one line per mismatch.
std::vector<std::string> compare_classification(const std::vector<ClassifyRow>& rows,
                                                const std::vector<std::pair<std::string, Graph>>& named,
                                                const std::string& expected);

}  // namespace cutdesign
