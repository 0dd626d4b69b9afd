// Estimation of transaction-cost parameters from trade observations.
//
// Equity model:  c = beta_s * s + beta_pi * sigma * x^gamma1          (NLS)
// Bond model:    c = c_beta + beta_s * s + beta~ * D * R * y^gamma1   (two-stage or grid search)
// where R is daily volatility or DTS and D = 1{c > s}.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lst/core.hpp"

namespace lst {

struct TradeObservation {
    double cost = 0.0;           // realized unit cost c_i
    double spread = 0.0;         // s_i
    double participation = 0.0;  // x_i or y_i
    double risk = 0.0;           // daily sigma_i or DTS_i
    std::string security_id;
    std::string issuer;
    std::string currency;
    std::string cap_bucket;
    double market_cap = 0.0;
};

struct Estimate {
    std::string name;
    double value = 0.0;
    double stderr_ = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

struct FitResult {
    std::vector<Estimate> estimates;
    double r2 = 0.0;    // uncentered
    double r2_c = 0.0;  // centered
    double ssr = 0.0;
    std::size_t n_used = 0;
    std::size_t n_excluded_negative = 0;
    int iterations = 0;
    std::vector<std::string> warnings;

    const Estimate& get(const std::string& name) const;
    double value(const std::string& name) const { return get(name).value; }
    bool has(const std::string& name) const;
};

struct R2 {
    double r2 = 0.0;
    double r2_c = 0.0;
    bool r2_defined = true;
    bool r2_c_defined = true;
};

R2 r2_metrics(std::span<const double> fitted, std::span<const double> observed);

/// Drops trades with a negative realized cost. Returns the number removed.
std::size_t exclude_negative_costs(std::vector<TradeObservation>& obs);

// Equity non-linear least squares. Parameter order (beta_s, beta_pi, gamma1).
Eigen::VectorXd nls_residuals(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta);
/// Jacobian of the model (not of the residuals) with respect to theta.
Eigen::MatrixXd nls_jacobian(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta);
/// Gradient of the half sum of squared residuals.
Eigen::Vector3d nls_gradient(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta);
double nls_objective(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta);

struct NlsOptions {
    std::optional<double> fixed_gamma;
    int max_iter = 500;
    double tol = 1e-14;
};

FitResult nls_fit_equity(std::vector<TradeObservation> obs, const NlsOptions& opt = {});

struct PerSecurityFit {
    std::string security_id;
    FitResult fit;
    double condition = 0.0;
};

struct DistributionSummary {
    double mean = 0.0, median = 0.0, q10 = 0.0, q25 = 0.0, q75 = 0.0, q90 = 0.0, min = 0.0, max = 0.0;
};

struct PerSecurityResult {
    std::vector<PerSecurityFit> fits;
    std::vector<std::string> skipped;
    DistributionSummary beta_spread;
    DistributionSummary beta_impact;
};

DistributionSummary summarize(std::vector<double> values);

/// OLS of c on (s, sigma x^gamma1) security by security, gamma1 fixed.
PerSecurityResult per_security_ols(std::span<const TradeObservation> obs, double gamma1,
                                   std::size_t min_obs = 5);

struct BondFitOptions {
    bool intercept = true;
};

FitResult two_stage_bond_fit(std::vector<TradeObservation> obs, const BondFitOptions& opt = {});

/// Stage-2 regression for each gamma1 on the grid; keeps the largest centered R^2.
FitResult grid_search_gamma(std::vector<TradeObservation> obs, std::span<const double> grid,
                            const BondFitOptions& opt = {});

/// Stage-2 regression at a given gamma1, shared by the two bond estimators.
FitResult bond_stage_two(std::span<const TradeObservation> obs, double gamma1, const BondFitOptions& opt = {});

/// Cost predicted by a fitted bond or equity model.
double fitted_cost(const FitResult& fit, const TradeObservation& o);

// Toy model transforms.
struct ToyPrime {
    double s = 0.0;
    double alpha = 0.0;
    double x_tilde = 0.0;
    double x_plus = 0.0;
};

struct ToyDoublePrime {
    double s = 0.0;
    double alpha = 0.0;
    double x_plus = 0.0;
};

/// Matching at x = 0 and x = x+.
ToyDoublePrime toy_match_endpoints(const ToyPrime& p);
ToyPrime toy_match_endpoints_inverse(const ToyDoublePrime& p, double x_tilde);
/// Least-squares projection of the kinked model on a line, for uniform x on [0, x+].
ToyDoublePrime toy_ols_projection(const ToyPrime& p);
ToyPrime toy_ols_projection_inverse(const ToyDoublePrime& p, double x_tilde);

struct SyntheticModel {
    double c_beta = 0.0;
    double beta_spread = 1.0;
    double beta_impact = 1.0;
    double gamma1 = 0.5;
    double spread_lo = 1e-4, spread_hi = 1e-3;
    double risk_lo = 0.005, risk_hi = 0.03;
    /// Participation is log-uniform on [lo, hi].
    double participation_lo = 1e-4, participation_hi = 0.1;
    std::size_t securities = 1;
};

std::vector<TradeObservation> synthetic_trades(const SyntheticModel& m, std::size_t n, double noise,
                                               std::uint64_t seed);

/// CDF of the participation law used by synthetic_trades.
double synthetic_participation_cdf(const SyntheticModel& m, double x);

}  // namespace lst
