// Batch kernels. Each comes in a serial reference form and an OpenMP form
// that must agree with it element for element; the benchmarks compare them.
#pragma once

#include <span>
#include <vector>

#include "lst/costmodel.hpp"
#include "lst/distortion.hpp"
#include "lst/evt.hpp"

namespace lst::kernels {

/// Unit impact kernel on a participation grid; +inf marks prohibitive points.
std::vector<double> impact_grid_serial(std::span<const double> xs, const BucketParams& bucket);
std::vector<double> impact_grid_parallel(std::span<const double> xs, const BucketParams& bucket);

/// One-day unit cost of selling q_i shares of every security (+inf beyond the limit).
std::vector<double> unit_costs_serial(std::span<const double> q, std::span<const SecurityLiquidityProfile> profiles,
                                      std::span<const BucketParams> buckets);
std::vector<double> unit_costs_parallel(std::span<const double> q,
                                        std::span<const SecurityLiquidityProfile> profiles,
                                        std::span<const BucketParams> buckets);

/// GEV log-likelihood of one sample under many parameter sets.
std::vector<double> gev_loglik_serial(std::span<const double> maxima, std::span<const GevParams> params);
std::vector<double> gev_loglik_parallel(std::span<const double> maxima, std::span<const GevParams> params);

/// Frontier with candidates generated one lambda after another. lst::frontier
/// is the parallel counterpart and returns the same points.
std::vector<FrontierPoint> frontier_serial(const LiquidationProblem& p, std::vector<double> lambdas);

}  // namespace lst::kernels
