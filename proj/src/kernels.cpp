#include "lst/kernels.hpp"

#include <limits>

namespace lst::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same(std::size_t a, std::size_t b)
{
    if (a != b)
        throw InputError("kernel inputs have mismatched lengths");
}

double one_cost(double q, const SecurityLiquidityProfile& prof, const BucketParams& b)
{
    return unit_cost(q, prof, b).value_or(kInf);
}

}  // namespace

std::vector<double> impact_grid_serial(std::span<const double> xs, const BucketParams& bucket)
{
    bucket.validate();
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = impact_kernel(xs[i], bucket).value_or(kInf);
    return out;
}

std::vector<double> impact_grid_parallel(std::span<const double> xs, const BucketParams& bucket)
{
    bucket.validate();
    std::vector<double> out(xs.size());
    const auto n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = impact_kernel(xs[static_cast<std::size_t>(i)], bucket).value_or(kInf);
    return out;
}

std::vector<double> unit_costs_serial(std::span<const double> q, std::span<const SecurityLiquidityProfile> profiles,
                                      std::span<const BucketParams> buckets)
{
    require_same(q.size(), profiles.size());
    require_same(q.size(), buckets.size());
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        out[i] = one_cost(q[i], profiles[i], buckets[i]);
    return out;
}

std::vector<double> unit_costs_parallel(std::span<const double> q,
                                        std::span<const SecurityLiquidityProfile> profiles,
                                        std::span<const BucketParams> buckets)
{
    require_same(q.size(), profiles.size());
    require_same(q.size(), buckets.size());
    std::vector<double> out(q.size());
    const auto n = static_cast<long>(q.size());
    // Exceptions cannot cross the parallel region, so they are captured and rethrown.
    std::exception_ptr err;
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            out[i] = one_cost(q[i], profiles[i], buckets[i]);
        } catch (...) {
#pragma omp critical
            if (!err)
                err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
    return out;
}

std::vector<double> gev_loglik_serial(std::span<const double> maxima, std::span<const GevParams> params)
{
    std::vector<double> out(params.size());
    for (std::size_t k = 0; k < params.size(); ++k)
        out[k] = gev_loglik(maxima, params[k]);
    return out;
}

std::vector<double> gev_loglik_parallel(std::span<const double> maxima, std::span<const GevParams> params)
{
    std::vector<double> out(params.size());
    const auto n = static_cast<long>(params.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = gev_loglik(maxima, params[static_cast<std::size_t>(k)]);
    return out;
}

std::vector<FrontierPoint> frontier_serial(const LiquidationProblem& p, std::vector<double> lambdas)
{
    p.validate();
    if (lambdas.empty())
        throw InvalidParams("frontier needs a non-empty lambda grid");
    std::vector<std::vector<RedemptionScenario>> pools;
    pools.reserve(lambdas.size());
    for (double l : lambdas)
        pools.push_back(candidate_scenarios(p, l));
    return frontier_from_candidates(p, std::move(lambdas), pools);
}

}  // namespace lst::kernels
