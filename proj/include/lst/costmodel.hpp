// Unit transaction cost models: toy models, power-law impact, the two-regime
// and square-root-linear kernels, the bucketed cost function used across the
// engine, and the stress transforms applied to security-specific parameters.
//
// Conventions: spreads, volatilities, participations and costs are stored as
// fractions (4 bps = 0.0004). Volatilities are annualized unless the argument
// name says otherwise; daily_vol() de-annualizes with sqrt(260).
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lst/core.hpp"

namespace lst {

/// Market data of one security at one date.
struct SecurityLiquidityProfile {
    std::string security_id;
    double price = 1.0;          // currency per share
    double half_spread = 0.0;    // s
    double annual_vol = 0.0;     // sigma, annualized
    double daily_volume = 0.0;   // v, shares per day
    std::optional<double> outstanding;  // N, shares
    std::optional<double> turnover;     // tau = v / N, per day
    std::optional<double> dts;          // duration-times-spread
    double fixed_cost_per_share = 0.0;  // alpha_i

    void validate() const;
};

enum class RiskMeasure { Volatility, Dts };
enum class ParticipationBasis { VolumeBased, OutstandingBased };

/// Cost-model parameters shared by every security of a liquidity bucket.
///
/// The impact kernel is two-regime: x^gamma1 up to x_tilde, continued by a
/// power gamma2 up to the trading limit x_plus, prohibitive beyond. Setting
/// x_tilde = x_plus = +inf gives the single-regime power law.
struct BucketParams {
    double beta_spread = 1.0;
    double beta_impact = 1.0;
    double gamma1 = 0.5;
    double gamma2 = 1.0;
    double x_tilde = 0.05;
    double x_plus = 0.10;
    RiskMeasure risk_measure = RiskMeasure::Volatility;
    ParticipationBasis participation_basis = ParticipationBasis::VolumeBased;

    void validate() const;

    /// Same parameters with the second regime and trading limit removed.
    BucketParams single_regime() const;

    bool operator==(const BucketParams&) const = default;
};

struct TwoRegimeImpactParams {
    double phi1 = 1.0;
    double gamma1 = 0.5;
    double gamma2 = 1.0;
    double x_tilde = 0.01;
    double x_plus = 1.0;

    /// Continuity-implied scale of the second regime.
    double phi2() const;
    void validate() const;
};

/// A shock on one risk parameter: multiplicative factor or additive shift.
struct Shock {
    enum class Kind { Mult, Add };
    Kind kind = Kind::Mult;
    double value = 1.0;

    static Shock mult(double m) { return {Kind::Mult, m}; }
    static Shock add(double delta) { return {Kind::Add, delta}; }

    double apply(double base) const
    {
        return kind == Kind::Mult ? base * value : base + value;
    }
    bool operator==(const Shock&) const = default;
};

/// Shocks applied to (spread, volatility, volume). Additive volatility shocks
/// are annualized fractions; the volume shock is always multiplicative.
struct StressScenario {
    Shock spread = Shock::mult(1.0);
    Shock vol = Shock::mult(1.0);
    double volume_mult = 1.0;

    static StressScenario identity() { return {}; }
    void validate() const;
    bool operator==(const StressScenario&) const = default;
};

/// A unit cost (fraction of traded value) or the prohibitive sentinel that
/// signals a participation beyond the trading limit.
class UnitCost {
public:
    explicit UnitCost(double value);
    static UnitCost prohibitive() { return UnitCost(); }

    bool is_prohibitive() const { return prohibitive_; }
    explicit operator bool() const { return !prohibitive_; }

    /// Throws ProhibitiveCostError for the prohibitive sentinel.
    double value() const;
    double value_or(double fallback) const { return prohibitive_ ? fallback : value_; }

    UnitCost operator+(double rhs) const;
    UnitCost operator*(double rhs) const;

    bool operator==(const UnitCost&) const = default;

private:
    UnitCost() : prohibitive_(true) {}
    double value_ = 0.0;
    bool prohibitive_ = false;
};

double daily_vol(double annual_vol);

// Toy models.
UnitCost toy_cost_prime(double x, double s, double alpha, double x_tilde, double x_plus);
UnitCost toy_cost_double_prime(double x, double s, double alpha, double x_plus);

// Impact kernels. sigma_daily is the de-annualized volatility.
double power_impact(double x, double gamma, double phi, double sigma_daily);
UnitCost two_regime_impact(double x, const TwoRegimeImpactParams& p, double sigma_daily);
UnitCost sqrl_impact(double x, double phi1, double x_tilde, double x_plus, double sigma_daily);

/// Default scale of the linear model implied by phi_half and the crossing point.
inline double linear_phi_from_sqrt(double phi_half, double x_tilde)
{
    return phi_half / std::sqrt(x_tilde);
}

/// Dimensionless two-regime kernel I*(x) with unit scale (Prohibitive above x_plus).
UnitCost impact_kernel(double participation, const BucketParams& bucket);

/// Participation x = q/v or y = q/N according to the bucket's basis.
double participation(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket);

/// Trading limit in shares: x_plus times the basis denominator.
double trading_limit_shares(const SecurityLiquidityProfile& profile, const BucketParams& bucket);

/// Risk scale R: daily volatility or DTS, per the bucket's risk measure.
double risk_scale(const SecurityLiquidityProfile& profile, const BucketParams& bucket);

/// beta_spread * s.
double spread_cost(const SecurityLiquidityProfile& profile, const BucketParams& bucket);

/// beta_impact * R * I*(participation), Prohibitive beyond the limit.
UnitCost impact_cost(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket);

/// Unit cost of selling q shares in one day (fixed per-share cost excluded).
UnitCost unit_cost(double q, const SecurityLiquidityProfile& profile, const BucketParams& bucket);

/// Unit cost in the participation parameterization, independent of volume.
UnitCost unit_cost_at_participation(double x, double half_spread, double risk,
                                    const BucketParams& bucket);

enum class BenchmarkKind { LargeCapEquity, SmallCapEquity, SovereignBond, CorporateBond, SovereignBondDts };

/// Benchmark bucket parameters. Second regime defaults: gamma2 = 1,
/// x_tilde = 2/3 x_plus; x_plus defaults to 10% (volume basis) or 300 bps
/// (outstanding basis).
BucketParams benchmark_bucket(BenchmarkKind kind, std::optional<double> x_plus = std::nullopt);

std::string to_string(BenchmarkKind kind);
std::optional<BenchmarkKind> parse_benchmark_kind(const std::string& name);

SecurityLiquidityProfile apply_stress(const SecurityLiquidityProfile& profile, const StressScenario& scenario);

/// sup over dates of the unit cost with that date's (s, sigma, v).
UnitCost historical_stress_cost(double q, std::span<const SecurityLiquidityProfile> history,
                                const BucketParams& bucket);

/// Worst-case composition: max spread, max volatility, min volume over the history.
SecurityLiquidityProfile worst_case_profile(std::span<const SecurityLiquidityProfile> history);

UnitCost worst_case_stress_cost(double q, std::span<const SecurityLiquidityProfile> history,
                                const BucketParams& bucket);

// Volume-based vs outstanding-based participation.
double x_from_y(double y, double turnover);
double y_from_x(double x, double turnover);

/// beta_hat = tau^gamma1 * beta_tilde.
double implied_beta(double turnover, double beta_tilde, double gamma1);
/// tau_hat = (beta / beta_tilde)^(1/gamma1).
double implied_turnover(double beta, double beta_tilde, double gamma1);

/// Bond return volatility approximated by spread volatility x duration x spread.
double dts_volatility(double spread_vol, double duration, double credit_spread);

}  // namespace lst
