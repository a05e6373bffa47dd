#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cutdesign/design.hpp"
#include "cutdesign/int_matrix.hpp"

namespace cutdesign {

struct FitResult {
    std::vector<double> beta_hat;
    std::vector<double> mu_hat;
    double g2 = 0.0;
    int df = 0;  // k - rank(M)
    bool converged = false;
    int iterations = 0;
};

struct FitOptions {
    double tolerance = 1e-10;  // on max |delta beta|
    int max_iterations = 100;
};

/// Poisson log-linear MLE by IRLS. Throws AllZero, ShapeMismatch and
/// NotConverged.
FitResult fit_poisson(const IntMatrix& m, std::span<const std::int64_t> y, const FitOptions& opts = {});
FitResult fit_poisson(const ModelMatrix& m, std::span<const std::int64_t> y, const FitOptions& opts = {});

/// 2 sum y log(y / mu); zero counts contribute 0.
double g2_statistic(std::span<const std::int64_t> y, std::span<const double> mu);
/// sum (y - mu)^2 / mu.
double pearson_statistic(std::span<const std::int64_t> y, std::span<const double> mu);

/// Poisson log-likelihood without the constant -sum log y!.
double poisson_loglik(const IntMatrix& m, std::span<const std::int64_t> y, std::span<const double> beta);

double chisq_sf(double x, int df);
double chisq_cdf(double x, int df);
double chisq_pdf(double x, int df);

/// Counts as CSV: one integer per line, or `run,count` pairs (runs 1-based,
/// any order). Blank lines and `#` comments are skipped.
IntVector read_counts(std::istream& in);
IntVector read_counts_file(const std::string& path);
/// `run,y,mu` lines with `digits` decimals.
void write_fitted_csv(std::ostream& out, std::span<const std::int64_t> y, std::span<const double> mu, int digits = 2);

}  // namespace cutdesign
