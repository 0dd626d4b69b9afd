#include "lst/liquidation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lst {

namespace {

void check_prices(std::size_t n, std::span<const double> prices)
{
    if (prices.size() != n)
        throw InputError("price vector length does not match the number of securities");
}

/// Currency value sold on day h (1-based) for each security.
double day_value(const LiquidationSchedule& s, std::span<const double> prices, int h)
{
    CompensatedSum v;
    for (std::size_t i = 0; i < s.size(); ++i)
        v += static_cast<double>(s.sold_on(i, h)) * prices[i];
    return v.value();
}

double scenario_value(const LiquidationSchedule& s, std::span<const double> prices)
{
    CompensatedSum v;
    for (std::size_t i = 0; i < s.size(); ++i)
        v += static_cast<double>(s.total(i)) * prices[i];
    return v.value();
}

Shares round_half_even(double x)
{
    // nearbyint honours the default rounding mode, which is round-half-even.
    return static_cast<Shares>(std::nearbyint(x));
}

}  // namespace

std::vector<double> Portfolio::prices() const
{
    std::vector<double> p;
    p.reserve(holdings.size());
    for (const auto& h : holdings)
        p.push_back(h.price);
    return p;
}

std::vector<Shares> Portfolio::shares() const
{
    std::vector<Shares> w;
    w.reserve(holdings.size());
    for (const auto& h : holdings)
        w.push_back(h.shares);
    return w;
}

double Portfolio::tna() const
{
    CompensatedSum v;
    for (const auto& h : holdings)
        v += static_cast<double>(h.shares) * h.price;
    return v.value();
}

void Portfolio::validate() const
{
    for (const auto& h : holdings) {
        if (h.shares < 0)
            throw InputError("holding '" + h.security_id + "' has negative shares");
        if (!(h.price > 0.0))
            throw InputError("holding '" + h.security_id + "' has a non-positive price");
    }
    if (!(tna() > 0.0))
        throw InputError("portfolio total net assets must be positive");
}

double RedemptionScenario::value(std::span<const double> prices) const
{
    check_prices(quantities.size(), prices);
    CompensatedSum v;
    for (std::size_t i = 0; i < quantities.size(); ++i)
        v += static_cast<double>(quantities[i]) * prices[i];
    return v.value();
}

bool RedemptionScenario::empty() const
{
    return std::all_of(quantities.begin(), quantities.end(), [](Shares q) { return q == 0; });
}

ProRataResult pro_rata(const Portfolio& portfolio, double redemption_rate)
{
    if (!(redemption_rate >= 0.0 && redemption_rate <= 1.0))
        throw InvalidParams("redemption rate must lie in [0, 1]");
    ProRataResult r;
    for (const auto& h : portfolio.holdings) {
        r.scenario.security_ids.push_back(h.security_id);
        r.scenario.quantities.push_back(round_half_even(redemption_rate * static_cast<double>(h.shares)));
    }
    r.target_value = redemption_rate * portfolio.tna();
    r.achieved_value = r.scenario.value(portfolio.prices());
    return r;
}

std::vector<Shares> limits_from_participation(std::span<const SecurityLiquidityProfile> profiles, double x_plus)
{
    if (!(x_plus > 0.0))
        throw InvalidParams("participation limit must be positive");
    std::vector<Shares> out;
    out.reserve(profiles.size());
    // The small allowance absorbs representation error such as 0.1 * 2000.
    for (const auto& p : profiles)
        out.push_back(static_cast<Shares>(std::floor(x_plus * p.daily_volume * (1.0 + 1e-12) + 1e-9)));
    return out;
}

std::vector<Shares> limits_from_buckets(std::span<const SecurityLiquidityProfile> profiles,
                                        std::span<const BucketParams> buckets)
{
    if (profiles.size() != buckets.size())
        throw InputError("one bucket is required per security");
    std::vector<Shares> out;
    out.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const double lim = trading_limit_shares(profiles[i], buckets[i]);
        out.push_back(std::isfinite(lim) ? static_cast<Shares>(std::floor(lim * (1.0 + 1e-12) + 1e-9))
                                         : std::numeric_limits<Shares>::max());
    }
    return out;
}

Shares LiquidationSchedule::sold_on(std::size_t i, int h) const
{
    if (h < 1 || h > horizon())
        return 0;
    return sold[i][static_cast<std::size_t>(h - 1)];
}

Shares LiquidationSchedule::total(std::size_t i) const
{
    Shares t = 0;
    for (Shares v : sold[i])
        t += v;
    return t;
}

LiquidationSchedule build_schedule(const RedemptionScenario& q, std::span<const Shares> limits)
{
    const std::size_t n = q.size();
    if (limits.size() != n)
        throw InputError("limit vector length does not match the redemption scenario");

    std::int64_t horizon = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (q.quantities[i] < 0)
            throw InputError("redemption quantities must be non-negative");
        if (q.quantities[i] == 0)
            continue;
        if (limits[i] <= 0)
            throw InvalidParams("security '" + (i < q.security_ids.size() ? q.security_ids[i] : std::to_string(i)) +
                                "' has a positive quantity but a zero trading limit");
        horizon = std::max<std::int64_t>(horizon, (q.quantities[i] + limits[i] - 1) / limits[i]);
    }

    LiquidationSchedule s;
    s.limits.assign(limits.begin(), limits.end());
    s.sold.assign(n, std::vector<Shares>(static_cast<std::size_t>(horizon), 0));
    for (std::size_t i = 0; i < n; ++i) {
        Shares remaining = q.quantities[i];
        for (std::size_t h = 0; remaining > 0; ++h) {
            const Shares today = std::min(remaining, limits[i]);
            s.sold[i][h] = today;
            remaining -= today;
        }
    }
    return s;
}

double liquidation_ratio(const LiquidationSchedule& s, std::span<const double> prices, int h)
{
    check_prices(s.size(), prices);
    if (h < 1)
        throw InvalidParams("liquidation ratio horizon must be at least one day");
    const double total = scenario_value(s, prices);
    if (!(total > 0.0))
        throw InputError("liquidation ratio is undefined for an empty redemption");
    if (h >= s.horizon())
        return 1.0;
    CompensatedSum sold;
    for (int k = 1; k <= h; ++k)
        sold += day_value(s, prices, k);
    return std::min(1.0, sold.value() / total);
}

std::vector<double> liquidation_ratio_curve(const LiquidationSchedule& s, std::span<const double> prices)
{
    std::vector<double> out;
    for (int h = 1; h <= s.horizon(); ++h)
        out.push_back(liquidation_ratio(s, prices, h));
    return out;
}

LiquidationContributions liquidation_contributions(const LiquidationSchedule& s, std::span<const double> prices)
{
    check_prices(s.size(), prices);
    const double total = scenario_value(s, prices);
    if (!(total > 0.0))
        throw InputError("liquidation contributions are undefined for an empty redemption");

    const std::size_t n = s.size();
    const auto H = static_cast<std::size_t>(s.horizon());
    LiquidationContributions c;
    c.weights.resize(n);
    c.by_day.assign(n, std::vector<double>(H, 0.0));
    c.cumulative.assign(n, std::vector<double>(H, 0.0));
    c.asset_ratio.assign(n, std::vector<double>(H, 0.0));
    c.day_totals.assign(H, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const Shares qi = s.total(i);
        c.weights[i] = static_cast<double>(qi) * prices[i] / total;
        Shares cum = 0;
        for (std::size_t h = 0; h < H; ++h) {
            cum += s.sold[i][h];
            c.by_day[i][h] = static_cast<double>(s.sold[i][h]) * prices[i] / total;
            c.cumulative[i][h] = static_cast<double>(cum) * prices[i] / total;
            c.asset_ratio[i][h] = qi > 0 ? static_cast<double>(cum) / static_cast<double>(qi) : 1.0;
        }
    }
    for (std::size_t h = 0; h < H; ++h) {
        CompensatedSum d;
        for (std::size_t i = 0; i < n; ++i)
            d += c.by_day[i][h];
        c.day_totals[h] = d.value();
    }
    return c;
}

int time_to_liquidation(const LiquidationSchedule& s, std::span<const double> prices, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw InvalidParams("liquidation level must lie in [0, 1]");
    const int H = s.horizon();
    for (int h = 1; h < H; ++h)
        if (liquidation_ratio(s, prices, h) >= p)
            return h;
    return std::max(H, 1);
}

double liquidation_shortfall(const LiquidationSchedule& s, std::span<const double> prices)
{
    return 1.0 - liquidation_ratio(s, prices, 1);
}

double break_even_redemption(const Portfolio& portfolio, std::span<const Shares> limits)
{
    portfolio.validate();
    if (limits.size() != portfolio.size())
        throw InputError("limit vector length does not match the portfolio");

    auto feasible = [&](double rate) {
        for (std::size_t i = 0; i < portfolio.size(); ++i)
            if (round_half_even(rate * static_cast<double>(portfolio.holdings[i].shares)) > limits[i])
                return false;
        return true;
    };
    if (feasible(1.0))
        return portfolio.tna();

    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (feasible(mid) ? lo : hi) = mid;
    }
    return pro_rata(portfolio, lo).achieved_value;
}

CostBreakdown total_cost(const LiquidationSchedule& s, std::span<const SecurityLiquidityProfile> profiles,
                         std::span<const BucketParams> buckets)
{
    const std::size_t n = s.size();
    if (profiles.size() != n || buckets.size() != n)
        throw InputError("profiles and buckets must match the schedule");
    const auto H = static_cast<std::size_t>(s.horizon());

    CostBreakdown c;
    c.spread_by_day.assign(n, std::vector<double>(H, 0.0));
    c.impact_by_day.assign(n, std::vector<double>(H, 0.0));
    c.total_by_day.assign(n, std::vector<double>(H, 0.0));
    c.per_asset_total.assign(n, 0.0);

    CompensatedSum bas, pi, fixed, red;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& prof = profiles[i];
        const auto& b = buckets[i];
        CompensatedSum asset;
        for (std::size_t h = 0; h < H; ++h) {
            const Shares qh = s.sold[i][h];
            if (qh == 0)
                continue;
            const double notional = static_cast<double>(qh) * prof.price;
            const UnitCost ic = impact_cost(static_cast<double>(qh), prof, b);
            if (ic.is_prohibitive())
                throw ProhibitiveCostError("security '" + prof.security_id + "' breaches its trading limit on day " +
                                           std::to_string(h + 1));
            const double sp = notional * spread_cost(prof, b);
            const double im = notional * ic.value();
            c.spread_by_day[i][h] = sp;
            c.impact_by_day[i][h] = im;
            c.total_by_day[i][h] = sp + im;
            bas += sp;
            pi += im;
            asset += sp + im;
        }
        const double qi = static_cast<double>(s.total(i));
        const double fx = prof.fixed_cost_per_share * qi;
        fixed += fx;
        asset += fx;
        red += qi * prof.price;
        c.per_asset_total[i] = asset.value();
    }
    c.spread_part = bas.value();
    c.impact_part = pi.value();
    c.fixed_part = fixed.value();
    c.total = c.spread_part + c.impact_part + c.fixed_part;
    c.redemption_value = red.value();
    c.relative = c.redemption_value > 0.0 ? c.total / c.redemption_value : 0.0;
    c.spread_ratio = c.spread_part > 0.0 ? c.total / c.spread_part : 0.0;
    return c;
}

CostBreakdown total_cost(const LiquidationSchedule& s, std::span<const SecurityLiquidityProfile> profiles,
                         const BucketParams& bucket)
{
    const std::vector<BucketParams> b(profiles.size(), bucket);
    return total_cost(s, profiles, b);
}

UnitCost instantaneous_relative_cost(const RedemptionScenario& q, std::span<const SecurityLiquidityProfile> profiles,
                                     std::span<const BucketParams> buckets)
{
    if (profiles.size() != q.size() || buckets.size() != q.size())
        throw InputError("profiles and buckets must match the redemption scenario");
    CompensatedSum cost, value;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double qi = static_cast<double>(q.quantities[i]);
        const UnitCost c = unit_cost(qi, profiles[i], buckets[i]);
        if (c.is_prohibitive())
            return c;
        cost += qi * profiles[i].price * c.value() + qi * profiles[i].fixed_cost_per_share;
        value += qi * profiles[i].price;
    }
    return UnitCost(value.value() > 0.0 ? cost.value() / value.value() : 0.0);
}

double schedule_cost_continuous(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket,
                                double limit)
{
    if (q <= 0.0)
        return 0.0;
    if (!(limit > 0.0))
        throw InvalidParams("continuous schedule cost needs a positive limit");
    const double full_days = std::floor(q / limit);
    const double rest = q - full_days * limit;
    double cost = profile.fixed_cost_per_share * q;
    if (full_days > 0.0)
        cost += full_days * limit * profile.price * unit_cost(limit, profile, bucket).value();
    if (rest > 0.0)
        cost += rest * profile.price * unit_cost(rest, profile, bucket).value();
    return cost;
}

double implementation_shortfall(double mid_value, std::span<const Fill> fills)
{
    CompensatedSum v;
    for (const auto& f : fills) {
        if (f.shares < 0.0 || f.bid_price < 0.0)
            throw InvalidParams("fills must be non-negative");
        v += f.shares * f.bid_price;
    }
    return std::max(mid_value - v.value(), 0.0);
}

}  // namespace lst
