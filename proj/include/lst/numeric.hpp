// Small numerical toolbox shared by the fitting modules.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lst {

/// Deterministic generator. The uniform and normal draws are built from the
/// raw 64-bit engine output so sequences match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct NelderMeadOptions {
    int max_iter = 5000;
    double ftol = 1e-12;
    double xtol = 1e-10;
    double initial_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimizes f starting from x0. Non-finite values of f are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt = {});

struct OlsResult {
    Eigen::VectorXd coef;
    Eigen::VectorXd stderr_;
    Eigen::VectorXd fitted;
    Eigen::MatrixXd cov;       // sigma^2 (X'X)^-1
    double ssr = 0.0;
    double sigma2 = 0.0;
    double condition = 0.0;    // 2-norm condition number of X
    int dof = 0;
};

/// Least squares via column-pivoted QR. Throws NumericalError when X is rank deficient.
OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Sample quantile with linear interpolation between order statistics
/// (position alpha * (n - 1) in the sorted sample).
double quantile_sorted(std::span<const double> sorted, double alpha);
double quantile(std::vector<double> values, double alpha);

double mean(std::span<const double> values);
double variance(std::span<const double> values);  // unbiased

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace lst
