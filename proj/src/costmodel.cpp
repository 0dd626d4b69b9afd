#include "lst/costmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace lst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what)
{
    if (!ok)
        throw InvalidParams(what);
}

double checked_nonneg(double v, const char* what)
{
    if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidParams(what);
    return v;
}

}  // namespace

void SecurityLiquidityProfile::validate() const
{
    require(price > 0.0 && std::isfinite(price), "price must be positive");
    require(half_spread >= 0.0, "half spread must be non-negative");
    require(annual_vol >= 0.0, "volatility must be non-negative");
    require(daily_volume >= 0.0, "daily volume must be non-negative");
    require(fixed_cost_per_share >= 0.0, "fixed cost per share must be non-negative");
    if (turnover)
        require(*turnover > 0.0 && *turnover <= 1.0, "turnover must lie in (0, 1]");
    if (dts)
        require(*dts >= 0.0, "DTS must be non-negative");
    if (outstanding)
        require(*outstanding >= 0.0, "outstanding must be non-negative");
}

void BucketParams::validate() const
{
    require(x_tilde > 0.0, "x_tilde must be positive");
    require(x_tilde <= x_plus, "x_tilde must not exceed x_plus");
    require(gamma1 > 0.0 && gamma2 > 0.0, "impact exponents must be positive");
    require(beta_spread >= 0.0 && beta_impact >= 0.0, "bucket betas must be non-negative");
}

BucketParams BucketParams::single_regime() const
{
    BucketParams out = *this;
    out.gamma2 = gamma1;
    out.x_tilde = kInf;
    out.x_plus = kInf;
    return out;
}

double TwoRegimeImpactParams::phi2() const
{
    return phi1 * std::pow(x_tilde, gamma1 - gamma2);
}

void TwoRegimeImpactParams::validate() const
{
    require(x_tilde > 0.0, "x_tilde must be positive");
    require(x_tilde <= x_plus, "x_tilde must not exceed x_plus");
    require(gamma1 > 0.0 && gamma2 > 0.0, "impact exponents must be positive");
    require(phi1 >= 0.0, "phi1 must be non-negative");
}

void StressScenario::validate() const
{
    if (spread.kind == Shock::Kind::Mult)
        require(spread.value > 0.0, "spread multiplier must be positive");
    if (vol.kind == Shock::Kind::Mult)
        require(vol.value > 0.0, "volatility multiplier must be positive");
    require(volume_mult > 0.0, "volume multiplier must be positive");
}

UnitCost::UnitCost(double value) : value_(value)
{
    if (!std::isfinite(value))
        throw InvalidParams("unit cost must be finite; use UnitCost::prohibitive()");
}

double UnitCost::value() const
{
    if (prohibitive_)
        throw ProhibitiveCostError("unit cost is prohibitive (participation above trading limit)");
    return value_;
}

UnitCost UnitCost::operator+(double rhs) const
{
    return UnitCost(value() + rhs);
}

UnitCost UnitCost::operator*(double rhs) const
{
    return UnitCost(value() * rhs);
}

double daily_vol(double annual_vol)
{
    checked_nonneg(annual_vol, "volatility must be non-negative");
    return annual_vol / std::sqrt(kTradingDaysPerYear);
}

UnitCost toy_cost_prime(double x, double s, double alpha, double x_tilde, double x_plus)
{
    require(x_tilde <= x_plus, "x_tilde must not exceed x_plus");
    checked_nonneg(x, "participation must be non-negative");
    if (x > x_plus)
        return UnitCost::prohibitive();
    if (x <= x_tilde)
        return UnitCost(s);
    return UnitCost(s + alpha * (x - x_tilde));
}

UnitCost toy_cost_double_prime(double x, double s, double alpha, double x_plus)
{
    checked_nonneg(x, "participation must be non-negative");
    if (x > x_plus)
        return UnitCost::prohibitive();
    return UnitCost(s + alpha * x);
}

double power_impact(double x, double gamma, double phi, double sigma_daily)
{
    checked_nonneg(x, "participation must be non-negative");
    require(gamma >= 0.0, "impact exponent must be non-negative");
    if (gamma == 0.0)
        return phi * sigma_daily;
    return phi * sigma_daily * std::pow(x, gamma);
}

UnitCost two_regime_impact(double x, const TwoRegimeImpactParams& p, double sigma_daily)
{
    p.validate();
    checked_nonneg(x, "participation must be non-negative");
    if (x > p.x_plus)
        return UnitCost::prohibitive();
    if (x <= p.x_tilde)
        return UnitCost(p.phi1 * sigma_daily * std::pow(x, p.gamma1));
    return UnitCost(p.phi2() * sigma_daily * std::pow(x, p.gamma2));
}

UnitCost sqrl_impact(double x, double phi1, double x_tilde, double x_plus, double sigma_daily)
{
    return two_regime_impact(x, TwoRegimeImpactParams{phi1, 0.5, 1.0, x_tilde, x_plus}, sigma_daily);
}

UnitCost impact_kernel(double x, const BucketParams& b)
{
    checked_nonneg(x, "participation must be non-negative");
    if (x > b.x_plus)
        return UnitCost::prohibitive();
    if (x <= b.x_tilde)
        return UnitCost(std::pow(x, b.gamma1));
    // Second regime, scaled so both branches meet at x_tilde.
    return UnitCost(std::pow(b.x_tilde, b.gamma1 - b.gamma2) * std::pow(x, b.gamma2));
}

double participation(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket)
{
    checked_nonneg(q, "quantity must be non-negative");
    double denom = 0.0;
    if (bucket.participation_basis == ParticipationBasis::VolumeBased) {
        denom = profile.daily_volume;
    } else {
        if (!profile.outstanding)
            throw MissingField("security '" + profile.security_id +
                               "': outstanding-based bucket requires the outstanding amount");
        denom = *profile.outstanding;
    }
    if (q == 0.0)
        return 0.0;
    if (!(denom > 0.0))
        throw InputError("security '" + profile.security_id +
                         "': participation denominator must be positive");
    return q / denom;
}

double trading_limit_shares(const SecurityLiquidityProfile& profile, const BucketParams& bucket)
{
    if (bucket.participation_basis == ParticipationBasis::VolumeBased)
        return bucket.x_plus * profile.daily_volume;
    if (!profile.outstanding)
        throw MissingField("security '" + profile.security_id +
                           "': outstanding-based bucket requires the outstanding amount");
    return bucket.x_plus * *profile.outstanding;
}

double risk_scale(const SecurityLiquidityProfile& profile, const BucketParams& bucket)
{
    if (bucket.risk_measure == RiskMeasure::Volatility)
        return daily_vol(profile.annual_vol);
    if (!profile.dts)
        throw MissingField("security '" + profile.security_id + "': DTS bucket requires a DTS value");
    return *profile.dts;
}

double spread_cost(const SecurityLiquidityProfile& profile, const BucketParams& bucket)
{
    return bucket.beta_spread * profile.half_spread;
}

UnitCost impact_cost(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket)
{
    const double x = participation(q, profile, bucket);
    const double r = risk_scale(profile, bucket);
    const UnitCost k = impact_kernel(x, bucket);
    if (k.is_prohibitive())
        return k;
    return UnitCost(bucket.beta_impact * r * k.value());
}

UnitCost unit_cost(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket)
{
    const UnitCost pi = impact_cost(q, profile, bucket);
    if (pi.is_prohibitive())
        return pi;
    return pi + spread_cost(profile, bucket);
}

UnitCost unit_cost_at_participation(double x, double half_spread, double risk, const BucketParams& bucket)
{
    const UnitCost k = impact_kernel(x, bucket);
    if (k.is_prohibitive())
        return k;
    return UnitCost(bucket.beta_spread * half_spread + bucket.beta_impact * risk * k.value());
}

BucketParams benchmark_bucket(BenchmarkKind kind, std::optional<double> x_plus)
{
    BucketParams b;
    b.gamma2 = 1.0;
    switch (kind) {
    case BenchmarkKind::LargeCapEquity:
        b.beta_spread = 1.25;
        b.beta_impact = 0.40;
        b.gamma1 = 0.5;
        break;
    case BenchmarkKind::SmallCapEquity:
        b.beta_spread = 1.40;
        b.beta_impact = 0.50;
        b.gamma1 = 0.5;
        break;
    case BenchmarkKind::SovereignBond:
        b.beta_spread = 1.25;
        b.beta_impact = 3.00;
        b.gamma1 = 0.25;
        b.participation_basis = ParticipationBasis::OutstandingBased;
        break;
    case BenchmarkKind::CorporateBond:
        b.beta_spread = 1.50;
        b.beta_impact = 0.125;
        b.gamma1 = 0.25;
        b.risk_measure = RiskMeasure::Dts;
        b.participation_basis = ParticipationBasis::OutstandingBased;
        break;
    case BenchmarkKind::SovereignBondDts:
        b.beta_spread = 1.25;
        b.beta_impact = 0.10;
        b.gamma1 = 0.25;
        b.risk_measure = RiskMeasure::Dts;
        b.participation_basis = ParticipationBasis::OutstandingBased;
        break;
    }
    const double default_limit =
        b.participation_basis == ParticipationBasis::VolumeBased ? 0.10 : from_bps(300.0);
    b.x_plus = x_plus.value_or(default_limit);
    b.x_tilde = 2.0 / 3.0 * b.x_plus;
    b.validate();
    return b;
}

std::string to_string(BenchmarkKind kind)
{
    switch (kind) {
    case BenchmarkKind::LargeCapEquity: return "large_cap_equity";
    case BenchmarkKind::SmallCapEquity: return "small_cap_equity";
    case BenchmarkKind::SovereignBond: return "sovereign_bond";
    case BenchmarkKind::CorporateBond: return "corporate_bond";
    case BenchmarkKind::SovereignBondDts: return "sovereign_bond_dts";
    }
    return "unknown";
}

std::optional<BenchmarkKind> parse_benchmark_kind(const std::string& name)
{
    std::string n;
    for (char c : name)
        n += c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto k : {BenchmarkKind::LargeCapEquity, BenchmarkKind::SmallCapEquity, BenchmarkKind::SovereignBond,
                   BenchmarkKind::CorporateBond, BenchmarkKind::SovereignBondDts})
        if (to_string(k) == n)
            return k;
    return std::nullopt;
}

SecurityLiquidityProfile apply_stress(const SecurityLiquidityProfile& profile, const StressScenario& scenario)
{
    scenario.validate();
    SecurityLiquidityProfile out = profile;
    out.half_spread = scenario.spread.apply(profile.half_spread);
    out.annual_vol = scenario.vol.apply(profile.annual_vol);
    out.daily_volume = profile.daily_volume * scenario.volume_mult;
    if (out.half_spread < 0.0)
        throw InvalidParams("stressed spread is negative");
    if (out.annual_vol < 0.0)
        throw InvalidParams("stressed volatility is negative");
    // Turnover is defined as v / N, so it moves with the volume shock.
    if (out.turnover)
        out.turnover = std::min(1.0, *profile.turnover * scenario.volume_mult);
    return out;
}

UnitCost historical_stress_cost(double q, std::span<const SecurityLiquidityProfile> history,
                                const BucketParams& bucket)
{
    if (history.empty())
        throw InputError("historical stress requires a non-empty history");
    double worst = 0.0;
    for (const auto& p : history) {
        const UnitCost c = unit_cost(q, p, bucket);
        if (c.is_prohibitive())
            return c;
        worst = std::max(worst, c.value());
    }
    return UnitCost(worst);
}

SecurityLiquidityProfile worst_case_profile(std::span<const SecurityLiquidityProfile> history)
{
    if (history.empty())
        throw InputError("worst-case stress requires a non-empty history");
    SecurityLiquidityProfile w = history.front();
    for (const auto& p : history) {
        w.half_spread = std::max(w.half_spread, p.half_spread);
        w.annual_vol = std::max(w.annual_vol, p.annual_vol);
        w.daily_volume = std::min(w.daily_volume, p.daily_volume);
        if (w.dts && p.dts)
            w.dts = std::max(*w.dts, *p.dts);
    }
    return w;
}

UnitCost worst_case_stress_cost(double q, std::span<const SecurityLiquidityProfile> history,
                                const BucketParams& bucket)
{
    return unit_cost(q, worst_case_profile(history), bucket);
}

double x_from_y(double y, double turnover)
{
    require(turnover > 0.0, "turnover must be positive");
    return y / turnover;
}

double y_from_x(double x, double turnover)
{
    require(turnover > 0.0, "turnover must be positive");
    return x * turnover;
}

double implied_beta(double turnover, double beta_tilde, double gamma1)
{
    require(turnover > 0.0 && beta_tilde > 0.0 && gamma1 > 0.0, "implied beta inputs must be positive");
    return std::pow(turnover, gamma1) * beta_tilde;
}

double implied_turnover(double beta, double beta_tilde, double gamma1)
{
    require(beta > 0.0 && beta_tilde > 0.0 && gamma1 > 0.0, "implied turnover inputs must be positive");
    return std::pow(beta / beta_tilde, 1.0 / gamma1);
}

double dts_volatility(double spread_vol, double duration, double credit_spread)
{
    checked_nonneg(spread_vol, "spread volatility must be non-negative");
    checked_nonneg(duration, "duration must be non-negative");
    checked_nonneg(credit_spread, "credit spread must be non-negative");
    return spread_vol * duration * credit_spread;
}

}  // namespace lst
