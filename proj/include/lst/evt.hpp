// Stress calibration of risk parameters with extreme value theory:
// historical quantiles, block maxima with a GEV fit, and peaks over threshold
// with a GPD fit. Also the linear factor-model (conditional) stress.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lst/core.hpp"

namespace lst {

/// Default block length for block maxima, in trading days.
inline constexpr int kDefaultBlockLength = 20;

struct GevParams {
    double mu = 0.0;
    double sigma = 1.0;
    double xi = 0.0;
};

struct GpdParams {
    double u0 = 0.0;
    double sigma = 1.0;
    double xi = 0.0;
    std::size_t n = 0;         // sample size
    std::size_t n_exceed = 0;  // observations above u0
};

enum class FactorKind { Mult, Add };

struct FactorSample {
    std::vector<double> values;
    int horizon = 1;
    FactorKind kind = FactorKind::Mult;
};

struct StressValue {
    double return_time = 0.0;  // trading days
    double value = 0.0;
};

// GEV distribution.
double gev_cdf(double x, const GevParams& p);
double gev_quantile(double prob, const GevParams& p);
double gev_loglik(std::span<const double> x, const GevParams& p);

// GPD of the exceedance y = x - u0.
double gpd_cdf(double y, double sigma, double xi);
double gpd_quantile(double prob, double sigma, double xi);
double gpd_loglik(std::span<const double> exceedances, double sigma, double xi);

/// Maximum of each complete non-overlapping block; the trailing partial block is dropped.
std::vector<double> block_maxima(std::span<const double> series, int block_len);

/// Probability-weighted-moments estimate, used to seed the likelihood search.
GevParams gev_pwm(std::span<const double> maxima);

struct GevFit {
    GevParams params;
    double loglik = 0.0;
    double initial_loglik = 0.0;
    int iterations = 0;
    std::size_t block_count = 0;
    int block_len = 0;
};

/// Maximum likelihood GEV fit on block maxima.
GevFit fit_gev(std::span<const double> maxima, std::size_t min_blocks = 20);

/// Stress at return time T (days): the GEV quantile at alpha = 1 - n_BM / T.
StressValue gev_stress(const GevParams& p, int block_len, double return_time);

struct MrlPoint {
    double u = 0.0;
    double mean_excess = 0.0;
    std::size_t n_exceed = 0;
};

/// Mean residual life on an evenly spaced grid from the sample minimum to the
/// third largest observation.
std::vector<MrlPoint> mean_residual_life(std::span<const double> series, std::size_t grid_points = 100);

struct ThresholdSuggestion {
    double u0 = 0.0;
    double r2 = 0.0;
    bool found = false;
    std::string method;
};

/// Heuristic only: the first grid point after which a linear fit of the mean
/// excess on the remaining grid reaches the R^2 target.
ThresholdSuggestion suggest_threshold(const std::vector<MrlPoint>& mrl, double r2_target = 0.98,
                                      std::size_t min_points = 10);

struct GpdFit {
    GpdParams params;
    double loglik = 0.0;
    double initial_loglik = 0.0;
    int iterations = 0;
};

GpdFit fit_gpd(std::span<const double> series, double u0, std::size_t min_exceed = 30);

/// u0 + (sigma/xi) ((n / (n' T))^-xi - 1).
StressValue gpd_stress(const GpdParams& p, double return_time);

/// Tail of the semi-parametric CDF, F(x) = 1 - (n'/n)(1 - G(x - u0)).
/// Only defined for x >= u0; the body is the empirical CDF of the sample.
double semi_parametric_cdf(double x, const GpdParams& p);

/// Overlapping h-day ratios (Mult) or differences (Add).
FactorSample make_factor_sample(std::span<const double> series, int horizon, FactorKind kind);

/// Reciprocal factors 1/m, which turn a reductive volume factor into a
/// participation stress.
FactorSample reciprocal(const FactorSample& s);

enum class AggregationMode { Pooling, Averaging };

FactorSample cross_section_aggregate(std::span<const FactorSample> samples, AggregationMode mode);

/// Per-block maxima of each security, averaged across securities block by block.
std::vector<double> averaged_block_maxima(std::span<const FactorSample> samples, int block_len);

/// Empirical quantile at alpha = 1 - h/T. Empty when the sample cannot resolve it.
std::optional<StressValue> historical_stress(const FactorSample& sample, double return_time);
double historical_alpha(int horizon, double return_time);

struct ConditionalStress {
    Eigen::VectorXd beta;     // intercept first
    Eigen::VectorXd stderrs;
    double stressed = 0.0;
};

/// OLS of p_t on (1, F_t) and projection at the factor stress vector.
ConditionalStress conditional_stress(std::span<const double> p, const Eigen::MatrixXd& factors,
                                     std::span<const double> factor_stress);

// Bid-ask end-of-day noise filters.
std::vector<double> moving_average(std::span<const double> series, int window = 10);
/// Median across securities at each date; rows are securities, all the same length.
std::vector<double> cross_sectional_median(std::span<const std::vector<double>> panel);

}  // namespace lst
