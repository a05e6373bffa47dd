#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cutdesign/error.hpp"
#include "cutdesign/glm.hpp"
#include "cutdesign/mcmc.hpp"
#include "support.hpp"

using namespace cutdesign;

namespace {

// 2x2 main-effect model, runs (1,1), (1,-1), (-1,1), (-1,-1).
const IntMatrix kSquare = IntMatrix::from_rows({{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}});
const IntVector kDiagonal{2, 0, 0, 2};
const std::vector<Move> kSquareBasis{{1, -1, -1, 1}};

Rational factorial(std::int64_t n) {
    Rational r = 1;
    for (std::int64_t i = 2; i <= n; ++i) r *= i;
    return r;
}

// Exact p by direct summation over a brute-force fiber, in rationals except
// for the statistic comparison.
double exact_by_summation(const IntMatrix& m, const IntVector& y0) {
    const auto fit = fit_poisson(m, y0);
    const double t0 = g2_statistic(y0, fit.mu_hat);
    Rational total = 0, tail = 0;
    for (const auto& y : testing::brute_fiber(m, y0)) {
        Rational w = 1;
        for (auto v : y) w /= factorial(v);
        total += w;
        if (g2_statistic(y, fit.mu_hat) >= t0 - 1e-9 * std::max(1.0, t0)) tail += w;
    }
    return static_cast<double>(Rational(tail / total));
}

ModelMatrix wave_main() { return model_matrix(testing::wave_design()); }
ModelMatrix wave_m2() { return model_matrix(testing::wave_design(), parse_model_terms("AC/BD")); }

}  // namespace

TEST_CASE("exact p on the 2x2 example") {
    CHECK(testing::brute_fiber(kSquare, kDiagonal) ==
          std::vector<IntVector>{{0, 2, 2, 0}, {1, 1, 1, 1}, {2, 0, 0, 2}});
    const auto r = exact_p(kSquare, kDiagonal);
    CHECK(r.fiber_size == 3);
    CHECK(r.p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(exact_by_summation(kSquare, kDiagonal)).epsilon(1e-12));
    CHECK(r.t_observed == doctest::Approx(8 * std::log(2.0)));
    // The middle table is the least extreme: every member counts.
    CHECK(exact_p(kSquare, IntVector{1, 1, 1, 1}).p == doctest::Approx(1.0));
    CHECK(exact_p(kSquare, kDiagonal, Statistic::Pearson).p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("exact p agrees with direct summation on small tables") {
    std::mt19937 rng(3);
    // Positive cells keep every margin positive, so the MLE exists.
    std::uniform_int_distribution<int> cell(1, 3);
    for (int trial = 0; trial < 4; ++trial) {
        // 8 runs of a 2^(4-1) design keep the brute-force fiber small.
        const IntMatrix m = model_matrix(design_from_relations(4, parse_relations("ABCD"))).columns;
        IntVector y(8);
        for (auto& v : y) v = cell(rng);
        CHECK(exact_p(m, y).p == doctest::Approx(exact_by_summation(m, y)).epsilon(1e-9));
    }
}

TEST_CASE("singleton fibers and constant statistics") {
    const IntMatrix sat = model_matrix(design_from_relations(2, parse_relations("I")), parse_model_terms("AB")).columns;
    const IntVector y{3, 1, 4, 1};
    CHECK(exact_p(sat, y).fiber_size == 1);
    CHECK(exact_p(sat, y).p == 1.0);
    ChainConfig cfg;
    cfg.steps = 1000;
    cfg.burn_in = 10;
    const auto chain = mh_sample(sat, y, {}, cfg);
    CHECK(chain.p_hat == 1.0);
    CHECK(chain.acceptance_rate == 0.0);
}

TEST_CASE("detailed balance on the three-member fiber") {
    const auto fiber = testing::brute_fiber(kSquare, kDiagonal);
    CHECK(detailed_balance_holds(fiber, kSquareBasis));
    // One move, two signs: from the middle each sign is proposed with
    // probability 1/2 and accepted with probability 1!^4 / (2! 0! 0! 2!) = 1/4.
    CHECK(transition_probability(fiber[1], fiber[2], kSquareBasis) == Rational(1, 8));
    CHECK(transition_probability(fiber[2], fiber[1], kSquareBasis) == Rational(1, 2));
    CHECK(transition_probability(fiber[0], fiber[2], kSquareBasis) == 0);
    CHECK(fiber_weight(fiber[2]) == Rational(1, 4));
    CHECK(fiber_weight(fiber[2]) * transition_probability(fiber[2], fiber[1], kSquareBasis) ==
          fiber_weight(fiber[1]) * transition_probability(fiber[1], fiber[2], kSquareBasis));
}

TEST_CASE("Metropolis-Hastings estimate matches the exact p on the 2x2 example") {
    ChainConfig cfg;
    cfg.steps = 100000;
    cfg.burn_in = 1000;
    cfg.verify_fiber = true;
    const auto chain = mh_sample(kSquare, kDiagonal, kSquareBasis, cfg);
    const double p = 1.0 / 3.0;
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(cfg.steps));
    CHECK(std::abs(chain.p_hat - p) < 3 * se);
    CHECK(chain.statistic_samples.size() == cfg.steps);
}

TEST_CASE("chains are deterministic in the seed and stay in the fiber") {
    const ModelMatrix m2 = wave_m2();
    const auto basis = markov_basis(m2.columns).moves;
    ChainConfig cfg;
    cfg.steps = 5000;
    cfg.burn_in = 500;
    cfg.verify_fiber = true;
    const auto a = mh_sample(m2.columns, testing::wave_y(), basis, cfg);
    const auto b = mh_sample(m2.columns, testing::wave_y(), basis, cfg);
    CHECK(a.statistic_samples == b.statistic_samples);
    CHECK(a.p_hat == b.p_hat);
    cfg.seed = 2;
    const auto c = mh_sample(m2.columns, testing::wave_y(), basis, cfg);
    CHECK(c.statistic_samples != a.statistic_samples);
    CHECK(a.t_observed == doctest::Approx(19.0927).epsilon(1e-4));

    // p_hat is the fraction of samples at or above the observed value.
    std::size_t hits = 0;
    for (double t : a.statistic_samples) hits += t >= a.t_observed - 1e-9 * a.t_observed;
    CHECK(a.p_hat == doctest::Approx(static_cast<double>(hits) / static_cast<double>(cfg.steps)));

    // Thinning keeps every second sample of a longer run.
    cfg.seed = 1;
    cfg.thinning = 2;
    const auto thin = mh_sample(m2.columns, testing::wave_y(), basis, cfg);
    CHECK(thin.statistic_samples.size() == cfg.steps);

    const std::vector<std::uint64_t> seeds{1, 2, 3};
    cfg.thinning = 1;
    const auto par = mh_sample_parallel(m2.columns, testing::wave_y(), basis, cfg, seeds, 2);
    REQUIRE(par.size() == 3);
    CHECK(par[0].statistic_samples == a.statistic_samples);
    CHECK(par[1].statistic_samples == c.statistic_samples);
    CHECK(par[2].seed == 3);
}

TEST_CASE("chain input errors") {
    ChainConfig cfg;
    cfg.steps = 10;
    CHECK(testing::error_of([&] { mh_sample(kSquare, kDiagonal, {{1, 1, -1, -1}}, cfg); }) == ErrorCode::InvalidMove);
    CHECK(testing::error_of([&] { mh_sample(kSquare, kDiagonal, {{1, -1, 1}}, cfg); }) == ErrorCode::ShapeMismatch);
    CHECK(testing::error_of([&] { mh_sample(kSquare, IntVector{2, -1, 0, 2}, kSquareBasis, cfg); }) ==
          ErrorCode::InvalidInput);
    cfg.steps = 0;
    CHECK(testing::error_of([&] { mh_sample(kSquare, kDiagonal, kSquareBasis, cfg); }) == ErrorCode::InvalidInput);
    CHECK(parse_statistic("pearson") == Statistic::Pearson);
    CHECK(statistic_name(Statistic::G2) == "g2");
    CHECK(testing::error_of([] { parse_statistic("chi"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("histogram of a main-effect chain") {
    const ModelMatrix main = wave_main();
    const auto basis = markov_basis(main.columns).moves;
    REQUIRE(basis.size() == 77);
    ChainConfig cfg;
    const auto chain = mh_sample(main.columns, testing::wave_y(), basis, cfg);
    const auto rows = statistic_histogram(chain, 20, 8);
    REQUIRE(rows.size() == 20);
    std::uint64_t total = 0;
    for (const auto& r : rows) {
        total += r.count;
        CHECK(r.chisq_density == doctest::Approx(chisq_pdf(r.center, 8)));
    }
    CHECK(total == cfg.steps);
    const double mean = std::accumulate(chain.statistic_samples.begin(), chain.statistic_samples.end(), 0.0) /
                        static_cast<double>(chain.statistic_samples.size());
    CHECK(std::abs(mean - 8.0) < 0.5);
    CHECK(chain.p_hat <= 0.0005);
    CHECK(testing::error_of([] { statistic_histogram(ChainResult{}, 20, 8); }) == ErrorCode::NoSamples);
}
