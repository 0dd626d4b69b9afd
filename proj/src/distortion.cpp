#include "lst/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "lst/numeric.hpp"

namespace lst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double value_of(std::span<const Shares> omega, std::span<const double> prices)
{
    CompensatedSum v;
    for (std::size_t i = 0; i < omega.size(); ++i)
        v += static_cast<double>(omega[i]) * prices[i];
    return v.value();
}

void check_sizes(std::size_t n, std::size_t m, const char* what)
{
    if (n != m)
        throw InputError(what);
}

/// Shifts v by a common t and clips to the bounds so the entries sum to one.
std::vector<double> project_to_simplex_box(std::vector<double> v, const WeightBounds& b)
{
    const std::size_t n = v.size();
    auto mass = [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += std::clamp(v[i] - t, b.lower[i], b.upper[i]);
        return s;
    };
    double lo = -1.0, hi = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        lo = std::min(lo, v[i] - b.upper[i] - 1.0);
        hi = std::max(hi, v[i] - b.lower[i] + 1.0);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mass(mid) > 1.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::clamp(v[i] - t, b.lower[i], b.upper[i]);
    return v;
}

/// Continuous objective used inside the local search.
class SmoothObjective {
public:
    SmoothObjective(const LiquidationProblem& p, double lambda)
        : p_(p), lambda_(lambda), omega_(p.portfolio.shares()), prices_(p.portfolio.prices()),
          w_(weights(omega_, prices_)), tna_(p.portfolio.tna())
    {
    }

    double operator()(const std::vector<double>& after) const
    {
        const std::size_t n = after.size();
        Eigen::VectorXd dw(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            dw(static_cast<Eigen::Index>(i)) = w_[i] - after[i];
        const double var = dw.dot(p_.cov * dw);
        if (lambda_ == 0.0)
            return 0.5 * var;
        CompensatedSum cost;
        for (std::size_t i = 0; i < n; ++i) {
            const double q = (tna_ * (w_[i] - after[i]) + p_.redemption * after[i]) / prices_[i];
            if (q <= 1e-9)
                continue;
            const double lim = static_cast<double>(p_.limits[i]);
            if (lim <= 0.0)
                return kInf;
            cost += schedule_cost_continuous(q, p_.profiles[i], p_.buckets[i], lim);
        }
        return 0.5 * var + lambda_ * cost.value() / p_.redemption;
    }

    const std::vector<double>& before() const { return w_; }

private:
    const LiquidationProblem& p_;
    double lambda_;
    std::vector<Shares> omega_;
    std::vector<double> prices_;
    std::vector<double> w_;
    double tna_;
};

/// Best step along the pair direction e_i - e_j within [lo, hi].
double pair_line_search(const SmoothObjective& f, std::vector<double>& x, std::size_t i, std::size_t j, double lo,
                        double hi, double fx)
{
    if (!(hi > lo))
        return fx;
    const double xi = x[i], xj = x[j];
    auto at = [&](double d) {
        x[i] = xi + d;
        x[j] = xj - d;
        const double v = f(x);
        x[i] = xi;
        x[j] = xj;
        return v;
    };

    constexpr int kGrid = 24;
    double best_d = 0.0, best_v = fx;
    const double h = (hi - lo) / kGrid;
    for (int k = 0; k <= kGrid; ++k) {
        const double d = lo + h * k;
        const double v = at(d);
        if (v < best_v) {
            best_v = v;
            best_d = d;
        }
    }
    // Golden-section refinement around the best grid point.
    double a = std::max(lo, best_d - h), b = std::min(hi, best_d + h);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = at(c), fd = at(d);
    for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
        }
    }
    if (fc < best_v) {
        best_v = fc;
        best_d = c;
    }
    if (fd < best_v) {
        best_v = fd;
        best_d = d;
    }
    if (best_v < fx) {
        x[i] = xi + best_d;
        x[j] = xj - best_d;
        return best_v;
    }
    return fx;
}

std::vector<double> coordinate_descent(const SmoothObjective& f, std::vector<double> x, const WeightBounds& b)
{
    const std::size_t n = x.size();
    double fx = f(x);
    for (int sweep = 0; sweep < 200; ++sweep) {
        const double start = fx;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double lo = std::max(b.lower[i] - x[i], x[j] - b.upper[j]);
                const double hi = std::min(b.upper[i] - x[i], x[j] - b.lower[j]);
                fx = pair_line_search(f, x, i, j, lo, hi, fx);
            }
        if (!(start - fx > 1e-14 * (std::abs(start) + 1e-300)))
            break;
    }
    return x;
}

RedemptionScenario round_scenario(const LiquidationProblem& p, const std::vector<double>& q)
{
    RedemptionScenario s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& h = p.portfolio.holdings[i];
        s.security_ids.push_back(h.security_id);
        s.quantities.push_back(std::clamp<Shares>(static_cast<Shares>(std::nearbyint(q[i])), 0, h.shares));
    }
    return s;
}

}  // namespace

std::vector<double> weights(std::span<const Shares> omega, std::span<const double> prices)
{
    check_sizes(omega.size(), prices.size(), "weights: holdings and prices differ in length");
    const double v = value_of(omega, prices);
    if (!(v > 0.0))
        throw InputError("weights: portfolio value must be positive");
    std::vector<double> w(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        w[i] = static_cast<double>(omega[i]) * prices[i] / v;
    return w;
}

std::vector<double> weights_after(std::span<const Shares> omega, std::span<const Shares> q,
                                  std::span<const double> prices)
{
    check_sizes(omega.size(), q.size(), "weights_after: holdings and scenario differ in length");
    std::vector<Shares> rest(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        rest[i] = omega[i] - q[i];
    if (!(value_of(rest, prices) > 0.0))
        throw InputError("weights_after: the scenario liquidates the whole portfolio");
    return weights(rest, prices);
}

std::vector<double> continuous_shares_from_weights(std::span<const double> target_after,
                                                   std::span<const Shares> omega, double redemption,
                                                   std::span<const double> prices)
{
    check_sizes(omega.size(), target_after.size(), "shares_from_weights: dimension mismatch");
    const auto w = weights(omega, prices);
    const double v = value_of(omega, prices);
    std::vector<double> q(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        q[i] = (v * (w[i] - target_after[i]) + redemption * target_after[i]) / prices[i];
    return q;
}

RedemptionScenario shares_from_weights(std::span<const double> target_after, std::span<const Shares> omega,
                                       double redemption, std::span<const double> prices, double epsilon)
{
    const auto q = continuous_shares_from_weights(target_after, omega, redemption, prices);
    RedemptionScenario s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < -epsilon || q[i] > static_cast<double>(omega[i]) + epsilon)
            throw InvalidParams("target weights are infeasible for security " + std::to_string(i));
        s.security_ids.push_back(std::to_string(i));
        s.quantities.push_back(std::clamp<Shares>(static_cast<Shares>(std::nearbyint(q[i])), 0, omega[i]));
    }
    return s;
}

Eigen::MatrixXd covariance_from_vol_corr(std::span<const double> vol, const Eigen::MatrixXd& corr)
{
    const auto n = static_cast<Eigen::Index>(vol.size());
    if (corr.rows() != n || corr.cols() != n)
        throw InputError("correlation matrix does not match the volatility vector");
    Eigen::MatrixXd c = corr;
    // Accept a lower-triangular input by mirroring it.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (c(i, j) == 0.0)
                c(i, j) = c(j, i);
            else if (c(j, i) == 0.0)
                c(j, i) = c(i, j);
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            s(i, j) = c(i, j) * vol[static_cast<std::size_t>(i)] * vol[static_cast<std::size_t>(j)];
    validate_covariance(s);
    return s;
}

void validate_covariance(const Eigen::MatrixXd& cov)
{
    if (cov.rows() != cov.cols())
        throw InputError("covariance matrix must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12) && cov.size() > 0)
        throw InputError("covariance matrix must be symmetric");
    if (cov.size() == 0)
        return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw InputError("covariance matrix is not positive semi-definite");
}

double tracking_error_weights(std::span<const double> before, std::span<const double> after,
                              const Eigen::MatrixXd& cov)
{
    const auto n = static_cast<Eigen::Index>(before.size());
    if (static_cast<Eigen::Index>(after.size()) != n || cov.rows() != n || cov.cols() != n)
        throw InputError("tracking error: dimension mismatch");
    Eigen::VectorXd dw(n);
    for (Eigen::Index i = 0; i < n; ++i)
        dw(i) = before[static_cast<std::size_t>(i)] - after[static_cast<std::size_t>(i)];
    return std::sqrt(std::max(0.0, dw.dot(cov * dw)));
}

double tracking_error(std::span<const Shares> omega, std::span<const Shares> q, const Eigen::MatrixXd& cov,
                      std::span<const double> prices)
{
    const auto before = weights(omega, prices);
    const auto after = weights_after(omega, q, prices);
    return tracking_error_weights(before, after, cov);
}

double active_risk_bond(std::span<const Shares> omega, std::span<const Shares> q,
                        std::span<const std::string> sector_of, std::span<const double> md,
                        std::span<const double> dts, std::span<const double> prices)
{
    const std::size_t n = omega.size();
    if (sector_of.size() != n || md.size() != n || dts.size() != n)
        throw InputError("active_risk_bond: dimension mismatch");
    const auto before = weights(omega, prices);
    const auto after = weights_after(omega, q, prices);
    std::map<std::string, std::pair<double, double>> exposure;
    for (std::size_t i = 0; i < n; ++i) {
        if (sector_of[i].empty())
            throw InputError("bond " + std::to_string(i) + " is not mapped to a sector");
        const double dw = before[i] - after[i];
        auto& e = exposure[sector_of[i]];
        e.first += dw * md[i];
        e.second += dw * dts[i];
    }
    double md_part = 0.0, dts_part = 0.0;
    for (const auto& [sector, e] : exposure) {
        md_part += e.first * e.first;
        dts_part += e.second * e.second;
    }
    return 0.5 * md_part + 0.5 * dts_part;
}

WeightBounds weight_bounds(std::span<const Shares> omega, double redemption, std::span<const double> prices,
                           double epsilon)
{
    const double v = value_of(omega, prices);
    if (!(redemption < v))
        throw InvalidParams("redemption must be smaller than total net assets");
    const auto w = weights(omega, prices);
    const double rest = v - redemption;
    WeightBounds b;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double eps_i = epsilon * prices[i] / rest;
        b.lower.push_back(-eps_i);
        b.upper.push_back(std::min(v * w[i] / rest + eps_i, 1.0));
    }
    return b;
}

void LiquidationProblem::validate() const
{
    portfolio.validate();
    const std::size_t n = portfolio.size();
    if (profiles.size() != n || buckets.size() != n || limits.size() != n)
        throw InputError("liquidation problem: profiles, buckets and limits must match the portfolio");
    if (cov.rows() != static_cast<Eigen::Index>(n))
        throw InputError("liquidation problem: covariance dimension mismatch");
    validate_covariance(cov);
    if (!(redemption > 0.0 && redemption < portfolio.tna()))
        throw InvalidParams("redemption must lie strictly between zero and total net assets");
}

ScenarioEvaluation evaluate_scenario(const LiquidationProblem& p, const RedemptionScenario& q)
{
    const auto omega = p.portfolio.shares();
    const auto prices = p.portfolio.prices();
    ScenarioEvaluation e;
    e.tracking_error = tracking_error(omega, q.quantities, p.cov, prices);
    if (q.empty())
        return e;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q.quantities[i] > 0 && p.limits[i] <= 0) {
            e.cost = kInf;
            return e;
        }
    const auto schedule = build_schedule(q, p.limits);
    e.cost = total_cost(schedule, p.profiles, p.buckets).relative;
    return e;
}

RedemptionScenario pro_rata_scenario(const LiquidationProblem& p)
{
    return pro_rata(p.portfolio, p.redemption / p.portfolio.tna()).scenario;
}

std::vector<RedemptionScenario> candidate_scenarios(const LiquidationProblem& p, double lambda)
{
    if (!(lambda >= 0.0))
        throw InvalidParams("lambda must be non-negative");
    const auto omega = p.portfolio.shares();
    const auto prices = p.portfolio.prices();
    const WeightBounds b = weight_bounds(omega, p.redemption, prices, p.epsilon);
    const SmoothObjective f(p, lambda);

    std::vector<RedemptionScenario> out;
    out.push_back(pro_rata_scenario(p));
    if (lambda == 0.0)
        return out;

    Rng rng(p.seed);
    const std::size_t n = omega.size();
    for (int s = 0; s < std::max(1, p.starts); ++s) {
        std::vector<double> x0;
        if (s == 0) {
            x0 = f.before();
        } else {
            x0.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                x0[i] = rng.uniform(b.lower[i], b.upper[i]);
        }
        x0 = project_to_simplex_box(std::move(x0), b);
        const auto x = coordinate_descent(f, std::move(x0), b);
        out.push_back(round_scenario(p, continuous_shares_from_weights(x, omega, p.redemption, prices)));
    }
    return out;
}

void flag_dominated(std::vector<FrontierPoint>& pts, double tol)
{
    for (auto& a : pts) {
        a.dominated = false;
        for (const auto& b : pts) {
            const bool no_worse = b.cost <= a.cost + tol && b.tracking_error <= a.tracking_error + tol;
            const bool better = b.cost < a.cost - tol || b.tracking_error < a.tracking_error - tol;
            if (no_worse && better) {
                a.dominated = true;
                break;
            }
        }
    }
}

std::vector<FrontierPoint> frontier_from_candidates(const LiquidationProblem& p, std::vector<double> lambdas,
                                                    const std::vector<std::vector<RedemptionScenario>>& pools)
{
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<RedemptionScenario> pool;
    std::set<std::vector<Shares>> seen;
    auto add = [&](const RedemptionScenario& s) {
        if (seen.insert(s.quantities).second)
            pool.push_back(s);
    };
    add(pro_rata_scenario(p));
    for (const auto& v : pools)
        for (const auto& s : v)
            add(s);

    std::vector<ScenarioEvaluation> evals;
    evals.reserve(pool.size());
    for (const auto& s : pool)
        evals.push_back(evaluate_scenario(p, s));

    std::vector<FrontierPoint> pts;
    for (double lambda : lambdas) {
        std::size_t best = 0;
        double best_obj = kInf;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            const double obj = evals[k].objective(lambda);
            if (obj < best_obj || (obj == best_obj && evals[k].cost < evals[best].cost)) {
                best = k;
                best_obj = obj;
            }
        }
        FrontierPoint fp;
        fp.lambda = lambda;
        fp.cost = evals[best].cost;
        fp.tracking_error = evals[best].tracking_error;
        fp.objective = best_obj;
        fp.scenario = pool[best];
        pts.push_back(std::move(fp));
    }
    flag_dominated(pts);
    return pts;
}

FrontierPoint optimal_liquidation(const LiquidationProblem& p, double lambda)
{
    p.validate();
    const std::vector<std::vector<RedemptionScenario>> pools{candidate_scenarios(p, lambda)};
    return frontier_from_candidates(p, {lambda}, pools).front();
}

std::vector<FrontierPoint> frontier(const LiquidationProblem& p, std::vector<double> lambdas)
{
    p.validate();
    if (lambdas.empty())
        throw InvalidParams("frontier needs a non-empty lambda grid");
    std::vector<std::vector<RedemptionScenario>> pools(lambdas.size());
    const auto m = static_cast<long>(lambdas.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < m; ++k)
        pools[static_cast<std::size_t>(k)] = candidate_scenarios(p, lambdas[static_cast<std::size_t>(k)]);
    return frontier_from_candidates(p, std::move(lambdas), pools);
}

}  // namespace lst
