// Serial reference versus OpenMP kernels. Run with
// --benchmark_filter=<name> to compare one pair.
#include <benchmark/benchmark.h>

#include <vector>

#include "lst/kernels.hpp"
#include "lst/numeric.hpp"

using namespace lst;

namespace {

std::vector<double> participation_grid(std::size_t n)
{
    std::vector<double> xs(n);
    for (std::size_t k = 0; k < n; ++k)
        xs[k] = 0.12 * static_cast<double>(k) / static_cast<double>(n);
    return xs;
}

struct Book {
    std::vector<double> q;
    std::vector<SecurityLiquidityProfile> profiles;
    std::vector<BucketParams> buckets;
};

Book make_book(std::size_t n)
{
    Rng rng(7);
    Book b;
    b.q.resize(n);
    b.profiles.resize(n);
    b.buckets.assign(n, benchmark_bucket(BenchmarkKind::LargeCapEquity));
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = b.profiles[i];
        p.half_spread = from_bps(rng.uniform(1, 20));
        p.annual_vol = rng.uniform(0.05, 0.6);
        p.daily_volume = rng.uniform(1e4, 1e6);
        b.q[i] = rng.uniform(0, 0.1) * p.daily_volume;
    }
    return b;
}

void BM_ImpactGridSerial(benchmark::State& st)
{
    const auto xs = participation_grid(static_cast<std::size_t>(st.range(0)));
    const auto b = benchmark_bucket(BenchmarkKind::SmallCapEquity);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::impact_grid_serial(xs, b));
}

void BM_ImpactGridParallel(benchmark::State& st)
{
    const auto xs = participation_grid(static_cast<std::size_t>(st.range(0)));
    const auto b = benchmark_bucket(BenchmarkKind::SmallCapEquity);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::impact_grid_parallel(xs, b));
}

void BM_UnitCostsSerial(benchmark::State& st)
{
    const auto b = make_book(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::unit_costs_serial(b.q, b.profiles, b.buckets));
}

void BM_UnitCostsParallel(benchmark::State& st)
{
    const auto b = make_book(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::unit_costs_parallel(b.q, b.profiles, b.buckets));
}

std::vector<double> gev_sample()
{
    Rng rng(3);
    std::vector<double> x(1000);
    for (auto& v : x)
        v = gev_quantile(rng.uniform(), GevParams{1.1, 0.1, 0.2});
    return x;
}

std::vector<GevParams> gev_grid(std::size_t n)
{
    Rng rng(4);
    std::vector<GevParams> g(n);
    for (auto& p : g)
        p = {rng.uniform(1.0, 1.2), rng.uniform(0.05, 0.2), rng.uniform(-0.3, 0.5)};
    return g;
}

void BM_GevLoglikSerial(benchmark::State& st)
{
    const auto x = gev_sample();
    const auto g = gev_grid(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::gev_loglik_serial(x, g));
}

void BM_GevLoglikParallel(benchmark::State& st)
{
    const auto x = gev_sample();
    const auto g = gev_grid(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::gev_loglik_parallel(x, g));
}

LiquidationProblem frontier_problem()
{
    LiquidationProblem p;
    const std::vector<double> vol{0.3, 0.2, 0.25, 0.15};
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(4, 4);
    corr(1, 0) = 0.5;
    corr(2, 1) = 0.3;
    corr(3, 0) = 0.2;
    for (int i = 0; i < 4; ++i) {
        p.portfolio.holdings.push_back({"S" + std::to_string(i), 10000 + 3000 * i, 50.0 + 10 * i});
        SecurityLiquidityProfile s;
        s.security_id = p.portfolio.holdings.back().security_id;
        s.price = p.portfolio.holdings.back().price;
        s.annual_vol = vol[i];
        s.half_spread = from_bps(5 + i);
        s.daily_volume = 5000.0 * (i + 1);
        p.profiles.push_back(s);
    }
    p.buckets.assign(4, benchmark_bucket(BenchmarkKind::LargeCapEquity));
    p.limits = limits_from_buckets(p.profiles, p.buckets);
    p.cov = covariance_from_vol_corr(vol, corr);
    p.redemption = 0.15 * p.portfolio.tna();
    return p;
}

const std::vector<double> kLambdas{0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};

void BM_FrontierSerial(benchmark::State& st)
{
    const auto p = frontier_problem();
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::frontier_serial(p, kLambdas));
}

void BM_FrontierParallel(benchmark::State& st)
{
    const auto p = frontier_problem();
    for (auto _ : st)
        benchmark::DoNotOptimize(frontier(p, kLambdas));
}

}  // namespace

BENCHMARK(BM_ImpactGridSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_ImpactGridParallel)->Arg(1 << 16)->Arg(1 << 20)->UseRealTime();
BENCHMARK(BM_UnitCostsSerial)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_UnitCostsParallel)->Arg(1 << 14)->Arg(1 << 18)->UseRealTime();
BENCHMARK(BM_GevLoglikSerial)->Arg(256)->Arg(4096);
BENCHMARK(BM_GevLoglikParallel)->Arg(256)->Arg(4096)->UseRealTime();
BENCHMARK(BM_FrontierSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FrontierParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
