// Redemption scenarios, multi-day liquidation schedules under trading limits,
// and the volume- and cost-based liquidity measures built on them.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lst/costmodel.hpp"

namespace lst {

using Shares = std::int64_t;

struct Holding {
    std::string security_id;
    Shares shares = 0;
    double price = 0.0;
};

struct Portfolio {
    std::vector<Holding> holdings;

    std::size_t size() const { return holdings.size(); }
    std::vector<double> prices() const;
    std::vector<Shares> shares() const;
    /// Total net assets, sum of shares x price.
    double tna() const;
    void validate() const;
};

struct RedemptionScenario {
    std::vector<std::string> security_ids;
    std::vector<Shares> quantities;

    std::size_t size() const { return quantities.size(); }
    double value(std::span<const double> prices) const;
    bool empty() const;
};

struct ProRataResult {
    RedemptionScenario scenario;
    double target_value = 0.0;
    double achieved_value = 0.0;
};

/// Vertical slicing: q_i = round(rate * omega_i), ties to even.
ProRataResult pro_rata(const Portfolio& portfolio, double redemption_rate);

/// Share limits q+ = floor(x+ * v) from a participation limit and each day's volume.
std::vector<Shares> limits_from_participation(std::span<const SecurityLiquidityProfile> profiles,
                                              double x_plus);
std::vector<Shares> limits_from_buckets(std::span<const SecurityLiquidityProfile> profiles,
                                        std::span<const BucketParams> buckets);

struct LiquidationSchedule {
    /// sold[i][h-1]: shares of security i sold on day h; every row has horizon() entries.
    std::vector<std::vector<Shares>> sold;
    std::vector<Shares> limits;

    std::size_t size() const { return sold.size(); }
    int horizon() const { return sold.empty() ? 0 : static_cast<int>(sold.front().size()); }
    Shares sold_on(std::size_t i, int h) const;
    Shares total(std::size_t i) const;
};

LiquidationSchedule build_schedule(const RedemptionScenario& q, std::span<const Shares> limits);

/// Value fraction of the redemption executed within h days. Zero redemption
/// has no defined ratio and throws InputError.
double liquidation_ratio(const LiquidationSchedule& s, std::span<const double> prices, int h);
/// LR(q; h) for h = 1..horizon.
std::vector<double> liquidation_ratio_curve(const LiquidationSchedule& s, std::span<const double> prices);

struct LiquidationContributions {
    std::vector<double> weights;                  // w_i
    std::vector<std::vector<double>> by_day;      // LC_{i,k}
    std::vector<double> day_totals;               // LC_k
    std::vector<std::vector<double>> cumulative;  // LC_i(q; h)
    std::vector<std::vector<double>> asset_ratio; // LR(q_i; h)
};

LiquidationContributions liquidation_contributions(const LiquidationSchedule& s, std::span<const double> prices);

/// Smallest h >= 1 with LR(q; h) >= p.
int time_to_liquidation(const LiquidationSchedule& s, std::span<const double> prices, double p);

/// 1 - LR(q; 1).
double liquidation_shortfall(const LiquidationSchedule& s, std::span<const double> prices);

/// Largest dollar redemption that pro-rata slicing can sell in one day.
double break_even_redemption(const Portfolio& portfolio, std::span<const Shares> limits);

struct CostBreakdown {
    double total = 0.0;
    double spread_part = 0.0;
    double impact_part = 0.0;
    double fixed_part = 0.0;
    double redemption_value = 0.0;
    double relative = 0.0;      // total / redemption value
    double spread_ratio = 0.0;  // total / spread part
    // Per security and day, in currency.
    std::vector<std::vector<double>> spread_by_day;
    std::vector<std::vector<double>> impact_by_day;
    std::vector<std::vector<double>> total_by_day;
    std::vector<double> per_asset_total;

    double impact_share() const { return total > 0 ? impact_part / total : 0.0; }
};

/// Day-by-day cost of a schedule. Throws ProhibitiveCostError when a day's
/// sale exceeds the bucket's trading limit.
CostBreakdown total_cost(const LiquidationSchedule& s, std::span<const SecurityLiquidityProfile> profiles,
                         std::span<const BucketParams> buckets);
CostBreakdown total_cost(const LiquidationSchedule& s, std::span<const SecurityLiquidityProfile> profiles,
                         const BucketParams& bucket);

/// Cost of selling everything on one day, ignoring the schedule. Prohibitive
/// if any security breaches its limit.
UnitCost instantaneous_relative_cost(const RedemptionScenario& q, std::span<const SecurityLiquidityProfile> profiles,
                                     std::span<const BucketParams> buckets);

/// Currency cost of selling a (possibly fractional) quantity by repeated days
/// at the limit followed by the remainder. Used as a smooth-in-q surrogate.
double schedule_cost_continuous(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket,
                                double limit);

struct Fill {
    double shares = 0.0;
    double bid_price = 0.0;
};

/// max(V_mid - sum of fills, 0).
double implementation_shortfall(double mid_value, std::span<const Fill> fills);

}  // namespace lst
