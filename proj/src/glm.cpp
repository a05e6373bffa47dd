#include "cutdesign/glm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cutdesign/error.hpp"

namespace cutdesign {

namespace {

Eigen::MatrixXd to_eigen(const IntMatrix& m) {
    Eigen::MatrixXd x(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) x(i, j) = static_cast<double>(m(i, j));
    return x;
}

}  // namespace

FitResult fit_poisson(const IntMatrix& m, std::span<const std::int64_t> y, const FitOptions& opts) {
    const std::size_t k = m.rows();
    if (y.size() != k) throw Error(ErrorCode::ShapeMismatch, "observation count differs from the model rows");
    if (m.cols() == 0) throw Error(ErrorCode::ShapeMismatch, "model has no columns");
    std::int64_t total = 0;
    for (auto v : y) {
        if (v < 0) throw Error(ErrorCode::InvalidInput, "negative count");
        total += v;
    }
    if (total == 0) throw Error(ErrorCode::AllZero, "all counts are zero");

    const Eigen::MatrixXd x = to_eigen(m);
    Eigen::VectorXd yv(k);
    for (std::size_t i = 0; i < k; ++i) yv(i) = static_cast<double>(y[i]);

    // Start from the constant fit. Column 0 is taken as the intercept when it
    // is constant, otherwise the start is solved for in the least-squares sense.
    const bool has_zero = std::any_of(y.begin(), y.end(), [](std::int64_t v) { return v == 0; });
    const double start = std::log(yv.mean() + (has_zero ? 0.5 : 0.0));
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    if ((x.col(0).array() == x(0, 0)).all() && x(0, 0) != 0.0) {
        beta(0) = start / x(0, 0);
    } else {
        beta = x.completeOrthogonalDecomposition().solve(Eigen::VectorXd::Constant(k, start));
    }

    FitResult out;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const Eigen::VectorXd eta = x * beta;
        const Eigen::VectorXd mu = eta.array().exp();
        const Eigen::VectorXd z = eta.array() + (yv - mu).array() / mu.array();
        const Eigen::VectorXd w = mu.array().sqrt();
        const Eigen::MatrixXd xw = w.asDiagonal() * x;
        const Eigen::VectorXd next = xw.completeOrthogonalDecomposition().solve(w.asDiagonal() * z);
        if (!next.allFinite()) throw Error(ErrorCode::NotConverged, "IRLS produced a non-finite estimate");
        const double delta = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        out.iterations = it;
        if (delta < opts.tolerance) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) throw Error(ErrorCode::NotConverged, "IRLS did not converge");

    const Eigen::VectorXd mu = (x * beta).array().exp();
    out.beta_hat.assign(beta.data(), beta.data() + beta.size());
    out.mu_hat.assign(mu.data(), mu.data() + mu.size());
    out.g2 = g2_statistic(y, out.mu_hat);
    out.df = static_cast<int>(k - integer_rank(m));
    return out;
}

FitResult fit_poisson(const ModelMatrix& m, std::span<const std::int64_t> y, const FitOptions& opts) {
    return fit_poisson(m.columns, y, opts);
}

double g2_statistic(std::span<const std::int64_t> y, std::span<const double> mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > 0) s += static_cast<double>(y[i]) * std::log(static_cast<double>(y[i]) / mu[i]);
    return 2.0 * s;
}

double pearson_statistic(std::span<const std::int64_t> y, std::span<const double> mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = static_cast<double>(y[i]) - mu[i];
        s += d * d / mu[i];
    }
    return s;
}

double poisson_loglik(const IntMatrix& m, std::span<const std::int64_t> y, std::span<const double> beta) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) eta += static_cast<double>(m(i, j)) * beta[j];
        s += static_cast<double>(y[i]) * eta - std::exp(eta);
    }
    return s;
}

double chisq_sf(double x, int df) {
    if (df <= 0) throw Error(ErrorCode::InvalidInput, "degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chisq_cdf(double x, int df) {
    if (df <= 0) throw Error(ErrorCode::InvalidInput, "degrees of freedom must be positive");
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double chisq_pdf(double x, int df) {
    if (df <= 0) throw Error(ErrorCode::InvalidInput, "degrees of freedom must be positive");
    if (x < 0.0) return 0.0;
    if (x == 0.0) return df == 2 ? 0.5 : (df == 1 ? INFINITY : 0.0);
    return boost::math::pdf(boost::math::chi_squared_distribution<double>(df), x);
}

IntVector read_counts(std::istream& in) {
    std::vector<std::int64_t> plain;
    std::map<long, std::int64_t> keyed;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<std::string> fields;
        for (std::string f; ls >> f;) fields.push_back(f);
        if (fields.empty()) continue;
        try {
            std::size_t used = 0;
            if (fields.size() == 1) {
                plain.push_back(std::stoll(fields[0], &used));
                if (used != fields[0].size()) throw std::invalid_argument("trailing");
            } else if (fields.size() == 2) {
                const long run = std::stol(fields[0]);
                const std::int64_t count = std::stoll(fields[1]);
                if (run < 1 || keyed.count(run)) throw std::invalid_argument("run");
                keyed[run] = count;
            } else {
                throw std::invalid_argument("fields");
            }
        } catch (const std::logic_error&) {
            // A header line such as `run,count` is tolerated once at the top.
            if (lineno == 1 && plain.empty() && keyed.empty()) continue;
            throw Error(ErrorCode::InvalidInput, "bad count line " + std::to_string(lineno));
        }
    }
    if (!plain.empty() && !keyed.empty()) throw Error(ErrorCode::InvalidInput, "mixed count formats");
    if (!keyed.empty()) {
        IntVector out;
        long expect = 1;
        for (auto [run, count] : keyed) {
            if (run != expect++) throw Error(ErrorCode::InvalidInput, "runs are not 1..k");
            out.push_back(count);
        }
        plain = std::move(out);
    }
    for (auto v : plain)
        if (v < 0) throw Error(ErrorCode::InvalidInput, "negative count");
    return plain;
}

IntVector read_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    return read_counts(in);
}

void write_fitted_csv(std::ostream& out, std::span<const std::int64_t> y, std::span<const double> mu, int digits) {
    out << "run,y,mu\n" << std::fixed << std::setprecision(digits);
    for (std::size_t i = 0; i < mu.size(); ++i) out << i + 1 << ',' << y[i] << ',' << mu[i] << '\n';
    out.unsetf(std::ios::fixed);
}

}  // namespace cutdesign
