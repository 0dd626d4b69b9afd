// Portfolio distortion caused by a liquidation and the cost/distortion
// efficient frontier.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lst/liquidation.hpp"

namespace lst {

/// w_i = omega_i P_i / V(omega).
std::vector<double> weights(std::span<const Shares> omega, std::span<const double> prices);
std::vector<double> weights_after(std::span<const Shares> omega, std::span<const Shares> q,
                                  std::span<const double> prices);

/// Continuous shares implied by target post-trade weights:
/// q_i = (V (w_i - w'_i) + R w'_i) / P_i.
std::vector<double> continuous_shares_from_weights(std::span<const double> target_after,
                                                   std::span<const Shares> omega, double redemption,
                                                   std::span<const double> prices);

/// Integer redemption scenario for target post-trade weights. Throws
/// InvalidParams when some q_i falls outside [-eps, omega_i + eps].
RedemptionScenario shares_from_weights(std::span<const double> target_after, std::span<const Shares> omega,
                                       double redemption, std::span<const double> prices, double epsilon = 0.5);

/// Builds Sigma from annualized volatilities and a correlation matrix.
Eigen::MatrixXd covariance_from_vol_corr(std::span<const double> vol, const Eigen::MatrixXd& corr);
void validate_covariance(const Eigen::MatrixXd& cov);

/// sqrt(dw' Sigma dw) with dw = w(omega) - w(omega - q).
double tracking_error(std::span<const Shares> omega, std::span<const Shares> q, const Eigen::MatrixXd& cov,
                      std::span<const double> prices);
double tracking_error_weights(std::span<const double> before, std::span<const double> after,
                              const Eigen::MatrixXd& cov);

/// Half the sum over sectors of squared MD active exposure plus half the sum
/// of squared DTS active exposure. No square root is taken.
double active_risk_bond(std::span<const Shares> omega, std::span<const Shares> q,
                        std::span<const std::string> sector_of, std::span<const double> md,
                        std::span<const double> dts, std::span<const double> prices);

struct WeightBounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Post-trade weight bounds implied by -eps <= q_i <= omega_i + eps.
WeightBounds weight_bounds(std::span<const Shares> omega, double redemption, std::span<const double> prices,
                           double epsilon = 0.5);

struct LiquidationProblem {
    Portfolio portfolio;
    double redemption = 0.0;
    Eigen::MatrixXd cov;
    std::vector<SecurityLiquidityProfile> profiles;
    std::vector<BucketParams> buckets;
    std::vector<Shares> limits;  // daily share limits
    double epsilon = 0.5;
    int starts = 8;
    std::uint64_t seed = 42;

    void validate() const;
};

struct FrontierPoint {
    double lambda = 0.0;
    double cost = 0.0;            // relative cost of the multi-day schedule
    double tracking_error = 0.0;
    double objective = 0.0;
    RedemptionScenario scenario;
    bool dominated = false;
};

/// Exact objective pieces for an integer scenario. Cost is +inf when some
/// security with a positive quantity has a zero limit.
struct ScenarioEvaluation {
    double cost = 0.0;
    double tracking_error = 0.0;
    double objective(double lambda) const
    {
        // Keeps 0 * inf from turning into NaN at lambda = 0.
        return 0.5 * tracking_error * tracking_error + (lambda == 0.0 ? 0.0 : lambda * cost);
    }
};
ScenarioEvaluation evaluate_scenario(const LiquidationProblem& p, const RedemptionScenario& q);

/// Pro-rata scenario that sells R dollars (rounded shares).
RedemptionScenario pro_rata_scenario(const LiquidationProblem& p);

FrontierPoint optimal_liquidation(const LiquidationProblem& p, double lambda);

/// Points sorted by lambda; every lambda picks its minimizer from the pool of
/// candidates found for all lambdas, so the frontier is monotone.
std::vector<FrontierPoint> frontier(const LiquidationProblem& p, std::vector<double> lambdas);

/// Local-search candidates (rounded scenarios) for one lambda.
std::vector<RedemptionScenario> candidate_scenarios(const LiquidationProblem& p, double lambda);

/// Pools the candidates, evaluates each exactly once and picks the minimizer
/// for every lambda. Ties go to the lower cost, then to the earlier candidate.
std::vector<FrontierPoint> frontier_from_candidates(const LiquidationProblem& p, std::vector<double> lambdas,
                                                    const std::vector<std::vector<RedemptionScenario>>& pools);

/// Sets the dominated flag on points beaten in both cost and tracking error.
void flag_dominated(std::vector<FrontierPoint>& points, double tol = 1e-12);

}  // namespace lst
