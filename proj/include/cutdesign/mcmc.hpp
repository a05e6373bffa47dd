#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cutdesign/int_matrix.hpp"
#include "cutdesign/markov.hpp"

namespace cutdesign {

/// Goodness-of-fit statistics evaluated against the MLE of the observed
/// table, which is constant on the fiber.
enum class Statistic { G2, Pearson };

Statistic parse_statistic(const std::string& name);
std::string statistic_name(Statistic s);

struct ChainConfig {
    std::uint64_t steps = 100000;  // recorded samples
    std::uint64_t burn_in = 50000;
    std::uint64_t seed = 1;
    std::uint64_t thinning = 1;
    bool verify_fiber = false;  // check M'y at every recorded sample
};

struct ChainResult {
    double p_hat = 0.0;
    double t_observed = 0.0;
    double acceptance_rate = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> statistic_samples;
};

struct ExactResult {
    double p = 0.0;
    double t_observed = 0.0;
    std::size_t fiber_size = 0;
};

/// Exact conditional p-value by enumerating the fiber of y0 under
/// f(y) proportional to prod 1/y_i!. Throws FiberTooLarge.
ExactResult exact_p(const IntMatrix& m, const IntVector& y0, Statistic stat = Statistic::G2,
                    std::size_t cap = kDefaultFiberCap);

/// Metropolis-Hastings over the fiber of y0. Proposal: a uniform move with a
/// uniform sign; proposals leaving the orthant are rejected. The generator is
/// std::mt19937_64 seeded with cfg.seed. Throws InvalidMove, InvalidInput.
ChainResult mh_sample(const IntMatrix& m, const IntVector& y0, const std::vector<Move>& basis, const ChainConfig& cfg,
                      Statistic stat = Statistic::G2);

/// One chain per seed, run on up to `threads` workers. Results are in seed
/// order and identical to running the chains one at a time.
std::vector<ChainResult> mh_sample_parallel(const IntMatrix& m, const IntVector& y0, const std::vector<Move>& basis,
                                            const ChainConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                            unsigned threads, Statistic stat = Statistic::G2);

struct HistogramRow {
    double center = 0.0;
    std::uint64_t count = 0;
    double chisq_density = 0.0;
};

/// Equal-width bins over [min, max] of the samples. Throws NoSamples.
std::vector<HistogramRow> statistic_histogram(const ChainResult& result, int bins, int df);

using Rational = boost::multiprecision::cpp_rational;

/// prod 1/y_i! as an exact rational.
Rational fiber_weight(const IntVector& y);
/// Exact one-step transition probability y -> y2 of the chain (y != y2).
Rational transition_probability(const IntVector& y, const IntVector& y2, const std::vector<Move>& basis);
/// f(y) P(y -> y2) == f(y2) P(y2 -> y) for every ordered pair of members.
bool detailed_balance_holds(const std::vector<IntVector>& fiber, const std::vector<Move>& basis);

}  // namespace cutdesign
