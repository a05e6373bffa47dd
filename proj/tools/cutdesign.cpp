// Command-line front end: graph <-> design conversion, Markov bases, model
// fitting, conditional tests and the classification tables.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cutdesign/design.hpp"
#include "cutdesign/error.hpp"
#include "cutdesign/glm.hpp"
#include "cutdesign/markov.hpp"
#include "cutdesign/mcmc.hpp"

#ifndef CUTDESIGN_DATA_DIR
#define CUTDESIGN_DATA_DIR "data"
#endif

using namespace cutdesign;

namespace {

struct Common {
    std::string format = "4ti2";
    unsigned threads = 1;
};

void emit(const IntMatrix& m, const Common& c) {
    if (c.format == "csv")
        write_csv(std::cout, m);
    else
        write_4ti2(std::cout, m);
}

IntMatrix moves_matrix(const std::vector<Move>& moves, std::size_t k) {
    MarkovBasis b;
    b.moves = moves;
    return b.as_matrix(k);
}

std::vector<Move> read_moves(const std::string& path) {
    const IntMatrix m = read_4ti2_file(path);
    std::vector<Move> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Relations from a file, or inline words such as "ABDE ACDF".
DefiningRelationSet relations_arg(const std::string& arg) {
    std::ifstream in(arg);
    if (in) return parse_relations(slurp(arg));
    std::string text = arg;
    for (char& ch : text)
        if (ch == ',') ch = '\n';
    return parse_relations(text);
}

std::string model_arg(const std::string& arg) {
    std::ifstream in(arg);
    if (!in) return arg;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (ls >> word) return word;
    }
    return "";
}

ModelMatrix model_for(const std::string& design_path, const std::string& model) {
    const DesignMatrix d = read_design_file(design_path);
    return model_matrix(d, model.empty() ? std::vector<std::vector<int>>{} : parse_model_terms(model_arg(model)));
}

Glue parse_glue(const std::string& text) {
    Glue glue;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::InvalidInput, "glue pairs are written a:b");
        glue.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    }
    return glue;
}

unsigned default_threads() {
    if (const char* env = std::getenv("CUTDESIGN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov bases, fits and conditional tests for two-level designs and cut ideals"};
    app.require_subcommand(1);
    Common common;
    common.threads = default_threads();
    app.add_option("--format", common.format, "matrix output format")
        ->check(CLI::IsMember({"4ti2", "csv"}));
    app.add_option("--threads", common.threads, "worker threads (default $CUTDESIGN_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    std::function<int()> action;

    // design
    auto* design = app.add_subcommand("design", "build design matrices")->require_subcommand(1);
    std::string graph_path;
    auto* d_graph = design->add_subcommand("from-graph", "cut design of a graph");
    d_graph->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    d_graph->callback([&] {
        action = [&] {
            emit(design_from_graph(read_graph_file(graph_path)).runs, common);
            return 0;
        };
    });
    std::size_t p = 0;
    std::string relations;
    bool show_resolution = false;
    auto* d_rel = design->add_subcommand("from-relations", "regular design from defining words");
    d_rel->add_option("p", p, "number of factors")->required()->check(CLI::Range(1, 63));
    d_rel->add_option("relations", relations, "file of words, or words separated by spaces/commas")->required();
    d_rel->add_flag("--resolution", show_resolution, "print the resolution to standard error");
    d_rel->callback([&] {
        action = [&] {
            std::string text = relations;
            const auto rel = relations_arg(text);
            if (show_resolution) std::cerr << "resolution " << roman(resolution(rel)) << '\n';
            emit(design_from_relations(p, rel).runs, common);
            return 0;
        };
    });

    // graph
    auto* graph = app.add_subcommand("graph", "graph search")->require_subcommand(1);
    std::string design_path, model;
    int max_vertices = 7;
    auto* g_find = graph->add_subcommand("find", "graph whose cut ideal matches a design model");
    g_find->add_option("design", design_path)->required()->check(CLI::ExistingFile);
    g_find->add_option("--model", model, "interactions, e.g. AB/AC, or a file holding them");
    g_find->add_option("--max-vertices", max_vertices)->check(CLI::Range(1, 8));
    g_find->callback([&] {
        action = [&] {
            const ModelMatrix m = model_for(design_path, model);
            GraphSearchOptions opts;
            opts.max_vertices = max_vertices;
            opts.threads = common.threads;
            const auto hit = graph_search_for_model(m.columns, opts);
            if (!hit) {
                std::cout << "no graph\n";
                return 0;
            }
            write_graph(std::cout, hit->graph);
            return 0;
        };
    });

    // config
    auto* config = app.add_subcommand("config", "configuration matrices")->require_subcommand(1);
    auto* c_cut = config->add_subcommand("cut", "cut configuration (2m x runs)");
    c_cut->add_option("graph", graph_path)->required()->check(CLI::ExistingFile);
    c_cut->callback([&] {
        action = [&] {
            emit(cut_configuration(read_graph_file(graph_path)).rows.transposed(), common);
            return 0;
        };
    });

    // basis
    auto* basis = app.add_subcommand("basis", "Markov bases")->require_subcommand(1);
    std::string config_path, moves_path;
    std::size_t max_runs = 32;
    auto* b_compute = basis->add_subcommand("compute", "minimal Markov basis of a configuration");
    b_compute->add_option("config", config_path, "configuration matrix, parameters x runs")->check(CLI::ExistingFile);
    b_compute->add_option("--design", design_path, "use the model matrix of a design instead")
        ->check(CLI::ExistingFile);
    b_compute->add_option("--model", model, "interactions for --design");
    b_compute->add_option("--graph", graph_path, "use the cut configuration of a graph")->check(CLI::ExistingFile);
    b_compute->add_option("--max-runs", max_runs);
    auto config_of = [&]() -> IntMatrix {
        const int given = !config_path.empty() + !design_path.empty() + !graph_path.empty();
        if (given != 1) throw CLI::ValidationError("give exactly one of CONFIG, --design, --graph");
        if (!design_path.empty()) return model_for(design_path, model).columns;
        if (!graph_path.empty()) return cut_configuration(read_graph_file(graph_path)).rows;
        return read_4ti2_file(config_path).transposed();
    };
    b_compute->callback([&] {
        action = [&] {
            const IntMatrix m = config_of();
            MarkovOptions opts;
            opts.max_runs = max_runs;
            emit(markov_basis(m, opts).as_matrix(m.rows()), common);
            return 0;
        };
    });
    int bound = 8;
    auto* b_verify = basis->add_subcommand("verify", "check that moves connect every small fiber");
    b_verify->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    b_verify->add_option("moves", moves_path)->required()->check(CLI::ExistingFile);
    b_verify->add_option("--bound", bound, "largest fiber total checked")->check(CLI::PositiveNumber);
    b_verify->callback([&] {
        action = [&] {
            const IntMatrix m = read_4ti2_file(config_path).transposed();
            if (!is_markov_basis(read_moves(moves_path), m, bound))
                throw Error(ErrorCode::NotMarkov, "some fiber with total <= " + std::to_string(bound) +
                                                      " is not connected");
            std::cout << "markov basis up to total " << bound << '\n';
            return 0;
        };
    });
    auto* b_struct = basis->add_subcommand("structured", "generators from the graph structure")
                         ->require_subcommand(1);
    std::string g1_path, g2_path, glue_text;
    bool from_second = false;
    auto* s_quad = b_struct->add_subcommand("quad", "degree-2 moves of a clique sum");
    auto* s_lift = b_struct->add_subcommand("lift", "lift moves of one part to a clique sum");
    for (auto* sub : {s_quad, s_lift}) {
        sub->add_option("g1", g1_path)->required()->check(CLI::ExistingFile);
        sub->add_option("g2", g2_path)->required()->check(CLI::ExistingFile);
        sub->add_option("--glue", glue_text, "shared clique as pairs v1:v2, e.g. 3:1,4:2")->required();
    }
    s_lift->add_option("--moves", moves_path, "moves on the runs of the part")->required()->check(CLI::ExistingFile);
    s_lift->add_flag("--second", from_second, "the moves belong to g2");
    auto run_structured = [&](bool lift) {
        const Graph g1 = read_graph_file(g1_path), g2 = read_graph_file(g2_path);
        const Glue glue = parse_glue(glue_text);
        const auto moves = lift ? lift_moves(read_moves(moves_path), g1, g2, glue, from_second)
                                : quad_moves(g1, g2, glue);
        const std::size_t k = std::size_t{1} << (k_sum(g1, g2, glue).graph.n_vertices() - 1);
        emit(moves_matrix(moves, k), common);
        return 0;
    };
    s_quad->callback([&] { action = [&] { return run_structured(false); }; });
    s_lift->callback([&] { action = [&] { return run_structured(true); }; });
    auto* s_theorem = b_struct->add_subcommand("theorem-graph", "graph of a design with one or two words");
    s_theorem->add_option("p", p)->required()->check(CLI::Range(1, 63));
    s_theorem->add_option("relations", relations)->required();
    s_theorem->callback([&] {
        action = [&] {
            const auto tg = theorem_graph(p, relations_arg(relations));
            write_graph(std::cout, tg.graph);
            return 0;
        };
    });

    // fit
    std::string y_path;
    int digits = 2;
    auto* fit = app.add_subcommand("fit", "Poisson log-linear fit");
    fit->add_option("design", design_path)->required()->check(CLI::ExistingFile);
    fit->add_option("y", y_path, "counts CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--model", model, "interactions, e.g. AC/BD, or a file holding them");
    fit->add_option("--digits", digits)->check(CLI::Range(0, 12));
    fit->callback([&] {
        action = [&] {
            const ModelMatrix m = model_for(design_path, model);
            const IntVector y = read_counts_file(y_path);
            const FitResult r = fit_poisson(m, y);
            write_fitted_csv(std::cout, y, r.mu_hat, digits);
            std::cout << std::setprecision(6) << "# G2 " << r.g2 << " df " << r.df << " p "
                      << (r.df > 0 ? chisq_sf(r.g2, r.df) : 1.0) << " iterations " << r.iterations << '\n';
            return 0;
        };
    });

    // test
    auto* test = app.add_subcommand("test", "conditional goodness-of-fit tests")->require_subcommand(1);
    std::string statistic = "g2";
    std::size_t cap = kDefaultFiberCap;
    auto* t_exact = test->add_subcommand("exact", "exact p-value by fiber enumeration");
    ChainConfig chain;
    std::size_t chains = 1;
    std::string histogram_path, trace_path, basis_path;
    int bins = 20;
    auto* t_mcmc = test->add_subcommand("mcmc", "Metropolis-Hastings p-value");
    for (auto* sub : {t_exact, t_mcmc}) {
        sub->add_option("design", design_path)->required()->check(CLI::ExistingFile);
        sub->add_option("y", y_path)->required()->check(CLI::ExistingFile);
        sub->add_option("--model", model);
        sub->add_option("--statistic", statistic)->check(CLI::IsMember({"g2", "pearson"}));
    }
    t_exact->add_option("--cap", cap, "largest fiber enumerated");
    t_exact->callback([&] {
        action = [&] {
            const ModelMatrix m = model_for(design_path, model);
            const auto r = exact_p(m.columns, read_counts_file(y_path), parse_statistic(statistic), cap);
            std::cout << "statistic,t_observed,fiber_size,p\n"
                      << statistic << ',' << std::setprecision(10) << r.t_observed << ',' << r.fiber_size << ','
                      << r.p << '\n';
            return 0;
        };
    });
    t_mcmc->add_option("--basis", basis_path, "moves (default: computed)")->check(CLI::ExistingFile);
    t_mcmc->add_option("--seed", chain.seed);
    t_mcmc->add_option("--steps", chain.steps)->check(CLI::PositiveNumber);
    t_mcmc->add_option("--burn-in", chain.burn_in);
    t_mcmc->add_option("--thinning", chain.thinning)->check(CLI::PositiveNumber);
    t_mcmc->add_option("--chains", chains, "independent chains with seeds seed, seed+1, ...")
        ->check(CLI::PositiveNumber);
    t_mcmc->add_option("--histogram", histogram_path, "write a histogram CSV of the first chain");
    t_mcmc->add_option("--bins", bins)->check(CLI::PositiveNumber);
    t_mcmc->add_option("--trace", trace_path, "write the statistic trace of the first chain");
    t_mcmc->callback([&] {
        action = [&] {
            const ModelMatrix m = model_for(design_path, model);
            const IntVector y = read_counts_file(y_path);
            const auto moves = basis_path.empty() ? markov_basis(m.columns).moves : read_moves(basis_path);
            std::vector<std::uint64_t> seeds;
            for (std::size_t i = 0; i < chains; ++i) seeds.push_back(chain.seed + i);
            std::cerr << "running " << chains << " chain(s) of " << chain.burn_in << " + " << chain.steps
                      << " steps with " << moves.size() << " moves\n";
            const auto results =
                mh_sample_parallel(m.columns, y, moves, chain, seeds, common.threads, parse_statistic(statistic));
            std::cout << "seed,t_observed,p_hat,acceptance_rate\n" << std::setprecision(6);
            double mean = 0.0;
            for (const auto& r : results) {
                std::cout << r.seed << ',' << r.t_observed << ',' << r.p_hat << ',' << r.acceptance_rate << '\n';
                mean += r.p_hat / static_cast<double>(results.size());
            }
            if (results.size() > 1) std::cout << "# mean p_hat " << mean << '\n';
            if (!histogram_path.empty()) {
                std::ofstream out(histogram_path);
                out << "center,count,chisq_density\n";
                const int df = fit_poisson(m, y).df;
                for (const auto& row : statistic_histogram(results.front(), bins, std::max(df, 1)))
                    out << row.center << ',' << row.count << ',' << row.chisq_density << '\n';
            }
            if (!trace_path.empty()) {
                std::ofstream out(trace_path);
                out << "step,statistic\n" << std::setprecision(10);
                const auto& s = results.front().statistic_samples;
                for (std::size_t i = 0; i < s.size(); ++i) out << i + 1 << ',' << s[i] << '\n';
            }
            return 0;
        };
    });

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "graphs for the 8- and 16-run designs")->require_subcommand(1);
    std::string expected_path;
    for (std::string which : {"8runs", "16runs"}) {
        auto* sub = classify_cmd->add_subcommand(which, "model -> graph table for " + which);
        sub->add_option("--expected", expected_path, "expected listing (default: bundled)");
        sub->callback([&, which] {
            action = [&, which] {
                const bool eight = which == "8runs";
                const auto named = eight ? reference_graphs_8runs() : reference_graphs_16runs();
                GraphSearchOptions opts;
                opts.threads = common.threads;
                const auto rows = classify(eight ? models_8runs() : models_16runs(), named, opts);
                std::cout << format_classification(rows, named);
                const std::string path =
                    expected_path.empty() ? std::string(CUTDESIGN_DATA_DIR) + "/classify_" + which + ".expected"
                                          : expected_path;
                const auto diff = compare_classification(rows, named, slurp(path));
                for (const auto& line : diff) std::cerr << "mismatch: " << line << '\n';
                if (!diff.empty()) {
                    std::cerr << diff.size() << " verdict(s) differ from " << path << '\n';
                    return 1;
                }
                std::cerr << "all verdicts agree with " << path << '\n';
                return 0;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        return action ? action() : 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
