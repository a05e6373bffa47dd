#include "cutdesign/mcmc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "cutdesign/error.hpp"
#include "cutdesign/glm.hpp"

namespace cutdesign {

Statistic parse_statistic(const std::string& name) {
    if (name == "g2") return Statistic::G2;
    if (name == "pearson") return Statistic::Pearson;
    throw Error(ErrorCode::InvalidInput, "unknown statistic " + name);
}

std::string statistic_name(Statistic s) { return s == Statistic::G2 ? "g2" : "pearson"; }

namespace {

double evaluate(Statistic stat, std::span<const std::int64_t> y, std::span<const double> mu) {
    return stat == Statistic::G2 ? g2_statistic(y, mu) : pearson_statistic(y, mu);
}

// Ties are decided with a relative tolerance so that tables equivalent to
// the observed one by symmetry count as ">=".
bool at_least(double t, double t0) { return t >= t0 - 1e-9 * std::max(1.0, std::abs(t0)); }

std::vector<double> log_factorials(std::int64_t n) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::int64_t i = 1; i <= n; ++i) out[i] = out[i - 1] + std::log(static_cast<double>(i));
    return out;
}

void check_counts(const IntMatrix& m, const IntVector& y0) {
    if (y0.size() != m.rows()) throw Error(ErrorCode::ShapeMismatch, "observation count differs from the model rows");
    for (auto v : y0)
        if (v < 0) throw Error(ErrorCode::InvalidInput, "negative count");
}

struct SparseMove {
    std::vector<std::size_t> index;
    std::vector<std::int64_t> value;
};

}  // namespace

ExactResult exact_p(const IntMatrix& m, const IntVector& y0, Statistic stat, std::size_t cap) {
    check_counts(m, y0);
    const FitResult fit = fit_poisson(m, y0);
    const Fiber fiber = enumerate_fiber(m, y0, cap);

    std::int64_t total = 0;
    for (auto v : y0) total += v;
    const auto lf = log_factorials(total);

    ExactResult out;
    out.t_observed = evaluate(stat, y0, fit.mu_hat);
    out.fiber_size = fiber.members.size();
    std::vector<double> logw;
    logw.reserve(fiber.members.size());
    for (const auto& y : fiber.members) {
        double s = 0.0;
        for (auto v : y) s -= lf[v];
        logw.push_back(s);
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fiber.members.size(); ++i) {
        const double w = std::exp(logw[i] - top);
        den += w;
        if (at_least(evaluate(stat, fiber.members[i], fit.mu_hat), out.t_observed)) num += w;
    }
    out.p = std::min(1.0, num / den);
    return out;
}

ChainResult mh_sample(const IntMatrix& m, const IntVector& y0, const std::vector<Move>& basis, const ChainConfig& cfg,
                      Statistic stat) {
    check_counts(m, y0);
    if (cfg.steps < 1) throw Error(ErrorCode::InvalidInput, "steps must be positive");
    if (cfg.thinning < 1) throw Error(ErrorCode::InvalidInput, "thinning must be positive");
    std::vector<SparseMove> moves;
    for (const auto& z : basis) {
        if (z.size() != m.rows()) throw Error(ErrorCode::ShapeMismatch, "move length differs from run count");
        if (!is_in_left_kernel(m, z)) throw Error(ErrorCode::InvalidMove, "basis move is not in the kernel");
        SparseMove s;
        for (std::size_t i = 0; i < z.size(); ++i)
            if (z[i] != 0) {
                s.index.push_back(i);
                s.value.push_back(z[i]);
            }
        if (!s.index.empty()) moves.push_back(std::move(s));
    }

    const FitResult fit = fit_poisson(m, y0);
    std::int64_t total = 0;
    for (auto v : y0) total += v;
    const auto lf = log_factorials(total);
    const IntVector target = left_multiply(m, y0);

    ChainResult out;
    out.seed = cfg.seed;
    out.t_observed = evaluate(stat, y0, fit.mu_hat);
    out.statistic_samples.reserve(cfg.steps);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    IntVector y = y0;
    std::uint64_t accepted = 0, proposals = 0, hits = 0;
    const std::uint64_t total_steps = cfg.burn_in + cfg.steps * cfg.thinning;
    for (std::uint64_t t = 1; t <= total_steps; ++t) {
        if (!moves.empty()) {
            ++proposals;
            const auto& mv = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
            const std::int64_t sign = (rng() & 1U) ? 1 : -1;
            bool inside = true;
            double log_ratio = 0.0;  // log prod y! - log prod y'!
            for (std::size_t j = 0; j < mv.index.size(); ++j) {
                const std::int64_t now = y[mv.index[j]];
                const std::int64_t next = now + sign * mv.value[j];
                if (next < 0) {
                    inside = false;
                    break;
                }
                log_ratio += lf[now] - lf[next];
            }
            if (inside && (log_ratio >= 0.0 || unit(rng) < std::exp(log_ratio))) {
                for (std::size_t j = 0; j < mv.index.size(); ++j) y[mv.index[j]] += sign * mv.value[j];
                ++accepted;
            }
        }
        if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0) {
            if (cfg.verify_fiber && left_multiply(m, y) != target)
                throw Error(ErrorCode::InvalidMove, "chain left the fiber");
            const double s = evaluate(stat, y, fit.mu_hat);
            out.statistic_samples.push_back(s);
            if (at_least(s, out.t_observed)) ++hits;
        }
    }
    out.p_hat = static_cast<double>(hits) / static_cast<double>(cfg.steps);
    out.acceptance_rate = proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    return out;
}

std::vector<ChainResult> mh_sample_parallel(const IntMatrix& m, const IntVector& y0, const std::vector<Move>& basis,
                                            const ChainConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                            unsigned threads, Statistic stat) {
    std::vector<ChainResult> out(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < seeds.size();) {
            try {
                ChainConfig c = cfg;
                c.seed = seeds[i];
                out[i] = mh_sample(m, y0, basis, c, stat);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<HistogramRow> statistic_histogram(const ChainResult& result, int bins, int df) {
    const auto& s = result.statistic_samples;
    if (s.empty()) throw Error(ErrorCode::NoSamples, "no stored samples");
    if (bins < 1) throw Error(ErrorCode::InvalidInput, "bins must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(s.begin(), s.end());
    const double lo = *lo_it;
    const double width = *hi_it > lo ? (*hi_it - lo) / bins : 1.0;
    std::vector<HistogramRow> out(bins);
    for (int b = 0; b < bins; ++b) {
        out[b].center = lo + (b + 0.5) * width;
        out[b].chisq_density = chisq_pdf(out[b].center, df);
    }
    for (double v : s) {
        const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
        ++out[b].count;
    }
    return out;
}

Rational fiber_weight(const IntVector& y) {
    boost::multiprecision::cpp_int denom = 1;
    for (auto v : y)
        for (std::int64_t i = 2; i <= v; ++i) denom *= i;
    return Rational(1) / Rational(denom);
}

Rational transition_probability(const IntVector& y, const IntVector& y2, const std::vector<Move>& basis) {
    if (basis.empty()) return 0;
    // Number of (move, sign) proposals landing on y2, each with probability 1/(2|B|).
    long hits = 0;
    for (const auto& z : basis)
        for (int sign : {1, -1}) {
            bool same = true;
            for (std::size_t i = 0; i < y.size() && same; ++i) same = y[i] + sign * z[i] == y2[i];
            hits += same;
        }
    const Rational accept = std::min<Rational>(Rational(1), fiber_weight(y2) / fiber_weight(y));
    return Rational(hits, 2 * static_cast<long>(basis.size())) * accept;
}

bool detailed_balance_holds(const std::vector<IntVector>& fiber, const std::vector<Move>& basis) {
    for (const auto& a : fiber)
        for (const auto& b : fiber) {
            if (a == b) continue;
            if (fiber_weight(a) * transition_probability(a, b, basis) !=
                fiber_weight(b) * transition_probability(b, a, basis))
                return false;
        }
    return true;
}

}  // namespace cutdesign
