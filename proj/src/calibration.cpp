#include "lst/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lst/numeric.hpp"

namespace lst {

namespace {

Estimate make_estimate(std::string name, double value, double se)
{
    Estimate e;
    e.name = std::move(name);
    e.value = value;
    e.stderr_ = std::max(se, 0.0);
    if (e.stderr_ > 0.0) {
        e.t_stat = value / e.stderr_;
        e.p_value = 2.0 * (1.0 - normal_cdf(std::abs(e.t_stat)));
    } else {
        e.t_stat = value == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), value);
        e.p_value = value == 0.0 ? 1.0 : 0.0;
    }
    return e;
}

Eigen::VectorXd costs_of(std::span<const TradeObservation> obs)
{
    Eigen::VectorXd y(static_cast<Eigen::Index>(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i)
        y(static_cast<Eigen::Index>(i)) = obs[i].cost;
    return y;
}

void set_r2(FitResult& f, const Eigen::VectorXd& fitted, const Eigen::VectorXd& y)
{
    const R2 r = r2_metrics(std::span<const double>(fitted.data(), static_cast<std::size_t>(fitted.size())),
                            std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
    f.r2 = r.r2;
    f.r2_c = r.r2_c;
    if (!r.r2_defined || !r.r2_c_defined)
        f.warnings.push_back("R^2 undefined: zero denominator");
}

double dummy(const TradeObservation& o) { return o.cost > o.spread ? 1.0 : 0.0; }

double powx(double x, double g) { return x > 0.0 ? std::pow(x, g) : 0.0; }

double logx(double x) { return x > 0.0 ? std::log(x) : 0.0; }

struct StageTwo {
    OlsResult ols;
    Eigen::MatrixXd X;
    bool intercept = true;
};

StageTwo stage_two_core(std::span<const TradeObservation> obs, double gamma1, bool intercept)
{
    const auto n = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index k = intercept ? 3 : 2;
    StageTwo st;
    st.intercept = intercept;
    st.X.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& o = obs[static_cast<std::size_t>(i)];
        Eigen::Index c = 0;
        if (intercept)
            st.X(i, c++) = 1.0;
        st.X(i, c++) = o.spread;
        // Trades with c <= s keep their row with a zeroed impact regressor.
        st.X(i, c) = dummy(o) * o.risk * powx(o.participation, gamma1);
    }
    st.ols = ols(st.X, costs_of(obs));
    return st;
}

}  // namespace

const Estimate& FitResult::get(const std::string& name) const
{
    for (const auto& e : estimates)
        if (e.name == name)
            return e;
    throw InvalidParams("fit result has no estimate named '" + name + "'");
}

bool FitResult::has(const std::string& name) const
{
    return std::any_of(estimates.begin(), estimates.end(), [&](const Estimate& e) { return e.name == name; });
}

R2 r2_metrics(std::span<const double> fitted, std::span<const double> observed)
{
    if (fitted.size() != observed.size() || observed.empty())
        throw InputError("r2_metrics needs equal-length, non-empty inputs");
    CompensatedSum ssr, sy2, sy;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = observed[i] - fitted[i];
        ssr += e * e;
        sy2 += observed[i] * observed[i];
        sy += observed[i];
    }
    const double ybar = sy.value() / static_cast<double>(observed.size());
    CompensatedSum sst;
    for (double y : observed)
        sst += (y - ybar) * (y - ybar);
    R2 r;
    r.r2_defined = sy2.value() > 0.0;
    r.r2_c_defined = sst.value() > 0.0;
    r.r2 = r.r2_defined ? 1.0 - ssr.value() / sy2.value() : std::numeric_limits<double>::quiet_NaN();
    r.r2_c = r.r2_c_defined ? 1.0 - ssr.value() / sst.value() : std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::size_t exclude_negative_costs(std::vector<TradeObservation>& obs)
{
    const auto before = obs.size();
    std::erase_if(obs, [](const TradeObservation& o) { return o.cost < 0.0; });
    return before - obs.size();
}

Eigen::VectorXd nls_residuals(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta)
{
    Eigen::VectorXd r(static_cast<Eigen::Index>(obs.size()));
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& o = obs[i];
        r(static_cast<Eigen::Index>(i)) =
            o.cost - theta(0) * o.spread - theta(1) * o.risk * powx(o.participation, theta(2));
    }
    return r;
}

Eigen::MatrixXd nls_jacobian(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta)
{
    Eigen::MatrixXd J(static_cast<Eigen::Index>(obs.size()), 3);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& o = obs[i];
        const auto r = static_cast<Eigen::Index>(i);
        const double xg = powx(o.participation, theta(2));
        J(r, 0) = o.spread;
        J(r, 1) = o.risk * xg;
        J(r, 2) = theta(1) * o.risk * xg * logx(o.participation);
    }
    return J;
}

Eigen::Vector3d nls_gradient(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta)
{
    return -nls_jacobian(obs, theta).transpose() * nls_residuals(obs, theta);
}

double nls_objective(std::span<const TradeObservation> obs, const Eigen::Vector3d& theta)
{
    return 0.5 * nls_residuals(obs, theta).squaredNorm();
}

FitResult nls_fit_equity(std::vector<TradeObservation> obs, const NlsOptions& opt)
{
    FitResult fit;
    fit.n_excluded_negative = exclude_negative_costs(obs);
    if (obs.size() < 10)
        throw InputError("NLS needs at least 10 observations");
    for (const auto& o : obs)
        if (!(o.participation > 0.0))
            throw InputError("NLS needs strictly positive participations");
    fit.n_used = obs.size();
    const Eigen::VectorXd y = costs_of(obs);
    if (y.squaredNorm() == 0.0)
        throw InputError("all costs are zero");

    auto linear_at = [&](double g) {
        Eigen::MatrixXd X(y.size(), 2);
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const auto& o = obs[static_cast<std::size_t>(i)];
            X(i, 0) = o.spread;
            X(i, 1) = o.risk * powx(o.participation, g);
        }
        return ols(X, y);
    };

    if (opt.fixed_gamma) {
        const double g = *opt.fixed_gamma;
        const OlsResult r = linear_at(g);
        fit.estimates.push_back(make_estimate("beta_spread", r.coef(0), r.stderr_(0)));
        fit.estimates.push_back(make_estimate("beta_impact", r.coef(1), r.stderr_(1)));
        Estimate ge = make_estimate("gamma1", g, 0.0);
        ge.t_stat = std::numeric_limits<double>::quiet_NaN();
        ge.p_value = std::numeric_limits<double>::quiet_NaN();
        fit.estimates.push_back(ge);
        fit.ssr = r.ssr;
        set_r2(fit, r.fitted, y);
        return fit;
    }

    // Profile initializer: the model is linear in the betas once gamma is fixed.
    Eigen::Vector3d theta;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 40; ++k) {
        const double g = 0.05 * k;
        try {
            const OlsResult r = linear_at(g);
            if (r.ssr < best) {
                best = r.ssr;
                theta << r.coef(0), r.coef(1), g;
            }
        } catch (const NumericalError&) {
        }
    }
    if (!std::isfinite(best))
        throw NumericalError("NLS initializer found no identifiable starting point");

    // Levenberg-Marquardt with the analytic Jacobian.
    double ssr = nls_residuals(obs, theta).squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    bool converged = false;
    for (; it < opt.max_iter; ++it) {
        const Eigen::VectorXd r = nls_residuals(obs, theta);
        const Eigen::MatrixXd J = nls_jacobian(obs, theta);
        const Eigen::Matrix3d A = J.transpose() * J;
        const Eigen::Vector3d g = J.transpose() * r;
        bool stepped = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::Matrix3d M = A;
            M.diagonal() += lambda * A.diagonal().cwiseMax(1e-300);
            const Eigen::Vector3d delta = M.ldlt().solve(g);
            const Eigen::Vector3d cand = theta + delta;
            const double cand_ssr = nls_residuals(obs, cand).squaredNorm();
            if (std::isfinite(cand_ssr) && cand_ssr <= ssr) {
                const double rel_step = delta.cwiseAbs().cwiseQuotient(theta.cwiseAbs().cwiseMax(1e-12)).maxCoeff();
                const double rel_ssr = (ssr - cand_ssr) / std::max(ssr, 1e-300);
                theta = cand;
                ssr = cand_ssr;
                lambda = std::max(lambda / 10.0, 1e-12);
                stepped = true;
                if (rel_step < 1e-12 || rel_ssr < opt.tol || ssr == 0.0)
                    converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped)
            converged = true;  // no descent direction left at machine precision
        if (converged)
            break;
    }
    if (!converged)
        throw NumericalError("NLS did not converge");

    fit.iterations = it + 1;
    fit.ssr = ssr;
    const Eigen::MatrixXd J = nls_jacobian(obs, theta);
    const double sigma2 = ssr / static_cast<double>(obs.size() - 3);
    const Eigen::Matrix3d cov = sigma2 * (J.transpose() * J).ldlt().solve(Eigen::Matrix3d::Identity());
    const Eigen::Vector3d se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    fit.estimates.push_back(make_estimate("beta_spread", theta(0), se(0)));
    fit.estimates.push_back(make_estimate("beta_impact", theta(1), se(1)));
    fit.estimates.push_back(make_estimate("gamma1", theta(2), se(2)));
    const Eigen::VectorXd fitted = y - nls_residuals(obs, theta);
    set_r2(fit, fitted, y);
    return fit;
}

DistributionSummary summarize(std::vector<double> v)
{
    DistributionSummary d;
    if (v.empty())
        return d;
    std::sort(v.begin(), v.end());
    d.mean = mean(v);
    d.median = quantile_sorted(v, 0.5);
    d.q10 = quantile_sorted(v, 0.10);
    d.q25 = quantile_sorted(v, 0.25);
    d.q75 = quantile_sorted(v, 0.75);
    d.q90 = quantile_sorted(v, 0.90);
    d.min = v.front();
    d.max = v.back();
    return d;
}

PerSecurityResult per_security_ols(std::span<const TradeObservation> obs, double gamma1, std::size_t min_obs)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<const TradeObservation*>> groups;
    for (const auto& o : obs) {
        auto [it, inserted] = groups.try_emplace(o.security_id);
        if (inserted)
            order.push_back(o.security_id);
        it->second.push_back(&o);
    }

    PerSecurityResult res;
    std::vector<double> bs, bpi;
    for (const auto& id : order) {
        const auto& g = groups[id];
        if (g.size() < min_obs) {
            res.skipped.push_back(id + ": " + std::to_string(g.size()) + " observations");
            continue;
        }
        const auto n = static_cast<Eigen::Index>(g.size());
        Eigen::MatrixXd X(n, 2);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& o = *g[static_cast<std::size_t>(i)];
            X(i, 0) = o.spread;
            X(i, 1) = o.risk * powx(o.participation, gamma1);
            y(i) = o.cost;
        }
        try {
            const OlsResult r = ols(X, y);
            PerSecurityFit f;
            f.security_id = id;
            f.condition = r.condition;
            f.fit.n_used = g.size();
            f.fit.ssr = r.ssr;
            f.fit.estimates.push_back(make_estimate("beta_spread", r.coef(0), r.stderr_(0)));
            f.fit.estimates.push_back(make_estimate("beta_impact", r.coef(1), r.stderr_(1)));
            f.fit.estimates.push_back(make_estimate("gamma1", gamma1, 0.0));
            set_r2(f.fit, r.fitted, y);
            if (r.condition > 1e8)
                f.fit.warnings.push_back("collinear regressors: condition number " + std::to_string(r.condition));
            bs.push_back(r.coef(0));
            bpi.push_back(r.coef(1));
            res.fits.push_back(std::move(f));
        } catch (const NumericalError& e) {
            res.skipped.push_back(id + ": " + e.what());
        }
    }
    res.beta_spread = summarize(bs);
    res.beta_impact = summarize(bpi);
    return res;
}

FitResult bond_stage_two(std::span<const TradeObservation> obs, double gamma1, const BondFitOptions& opt)
{
    const StageTwo st = stage_two_core(obs, gamma1, opt.intercept);
    FitResult f;
    f.n_used = obs.size();
    f.ssr = st.ols.ssr;
    Eigen::Index c = 0;
    if (opt.intercept) {
        f.estimates.push_back(make_estimate("c_beta", st.ols.coef(c), st.ols.stderr_(c)));
        ++c;
    }
    f.estimates.push_back(make_estimate("beta_spread", st.ols.coef(c), st.ols.stderr_(c)));
    ++c;
    f.estimates.push_back(make_estimate("beta_impact", st.ols.coef(c), st.ols.stderr_(c)));
    f.estimates.push_back(make_estimate("gamma1", gamma1, 0.0));
    set_r2(f, st.ols.fitted, costs_of(obs));
    return f;
}

FitResult two_stage_bond_fit(std::vector<TradeObservation> obs, const BondFitOptions& opt)
{
    const std::size_t excluded = exclude_negative_costs(obs);

    // Stage 1: log-linear regression on trades whose cost exceeds the spread.
    std::vector<double> z, lny;
    for (const auto& o : obs)
        if (o.cost > o.spread && o.participation > 0.0 && o.risk > 0.0) {
            z.push_back(std::log(o.cost - o.spread) - std::log(o.risk));
            lny.push_back(std::log(o.participation));
        }
    if (z.size() < 3)
        throw InputError("two-stage fit: stage-1 sample (cost > spread) is empty or too small");
    const auto m = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd X1(m, 2);
    Eigen::VectorXd y1(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        X1(i, 0) = 1.0;
        X1(i, 1) = lny[static_cast<std::size_t>(i)];
        y1(i) = z[static_cast<std::size_t>(i)];
    }
    const OlsResult s1 = ols(X1, y1);
    const double gamma1 = s1.coef(1);
    const double var_gamma = s1.cov(1, 1);

    // Stage 2 at the stage-1 exponent.
    const StageTwo st = stage_two_core(obs, gamma1, opt.intercept);
    const Eigen::Index k = st.X.cols();
    const Eigen::Index impact_col = k - 1;
    const double beta_tilde = st.ols.coef(impact_col);

    // Stage-2 errors are conditional on gamma1; add the variance carried over
    // from the first stage through the sensitivity of the stage-2 estimates.
    Eigen::VectorXd dfit(st.X.rows());
    for (Eigen::Index i = 0; i < st.X.rows(); ++i) {
        const auto& o = obs[static_cast<std::size_t>(i)];
        dfit(i) = beta_tilde * st.X(i, impact_col) * logx(o.participation);
    }
    const Eigen::MatrixXd xtx = st.X.transpose() * st.X;
    const Eigen::VectorXd a = xtx.ldlt().solve(st.X.transpose() * dfit);
    const Eigen::MatrixXd cov = st.ols.cov + var_gamma * a * a.transpose();
    const Eigen::VectorXd se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    FitResult f;
    f.n_excluded_negative = excluded;
    f.n_used = obs.size();
    f.ssr = st.ols.ssr;
    f.estimates.push_back(make_estimate("c_gamma", std::exp(s1.coef(0)), std::exp(s1.coef(0)) * s1.stderr_(0)));
    f.estimates.push_back(make_estimate("gamma1", gamma1, s1.stderr_(1)));
    Eigen::Index c = 0;
    if (opt.intercept) {
        f.estimates.push_back(make_estimate("c_beta", st.ols.coef(c), se(c)));
        ++c;
    }
    f.estimates.push_back(make_estimate("beta_spread", st.ols.coef(c), se(c)));
    ++c;
    f.estimates.push_back(make_estimate("beta_impact", st.ols.coef(c), se(c)));
    set_r2(f, st.ols.fitted, costs_of(obs));
    if (z.size() < obs.size())
        f.warnings.push_back(std::to_string(obs.size() - z.size()) + " trades with cost <= spread enter stage 2 "
                                                                       "with a zero impact regressor");
    return f;
}

FitResult grid_search_gamma(std::vector<TradeObservation> obs, std::span<const double> grid, const BondFitOptions& opt)
{
    if (grid.empty())
        throw InvalidParams("grid search needs a non-empty grid");
    const std::size_t excluded = exclude_negative_costs(obs);

    std::optional<FitResult> best;
    double best_gamma = 0.0;
    for (double g : grid) {
        FitResult f;
        try {
            f = bond_stage_two(obs, g, opt);
        } catch (const NumericalError&) {
            continue;
        }
        const bool better = !best || f.r2_c > best->r2_c || (f.r2_c == best->r2_c && g < best_gamma);
        if (better) {
            best = std::move(f);
            best_gamma = g;
        }
    }
    if (!best)
        throw NumericalError("grid search: every candidate exponent gave a singular design");

    // Standard errors from the joint non-linear model at the selected point.
    const StageTwo st = stage_two_core(obs, best_gamma, opt.intercept);
    const Eigen::Index k = st.X.cols();
    const double beta_tilde = st.ols.coef(k - 1);
    Eigen::MatrixXd J(st.X.rows(), k + 1);
    J.leftCols(k) = st.X;
    for (Eigen::Index i = 0; i < st.X.rows(); ++i)
        J(i, k) = beta_tilde * st.X(i, k - 1) * logx(obs[static_cast<std::size_t>(i)].participation);
    const double dof = static_cast<double>(st.X.rows() - (k + 1));
    const double sigma2 = dof > 0 ? st.ols.ssr / dof : 0.0;
    Eigen::MatrixXd cov;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    if (qr.rank() == k + 1)
        cov = sigma2 * (J.transpose() * J).ldlt().solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
    else
        cov = Eigen::MatrixXd::Zero(k + 1, k + 1);
    const Eigen::VectorXd se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    FitResult f = *best;
    f.n_excluded_negative = excluded;
    Eigen::Index c = 0;
    for (auto& e : f.estimates) {
        if (e.name == "gamma1")
            e = make_estimate("gamma1", best_gamma, se(k));
        else
            e = make_estimate(e.name, e.value, se(c++));
    }
    if (qr.rank() < k + 1)
        f.warnings.push_back("joint covariance is singular at the selected exponent; stderrs set to zero");
    return f;
}

double fitted_cost(const FitResult& fit, const TradeObservation& o)
{
    const double cb = fit.has("c_beta") ? fit.value("c_beta") : 0.0;
    return cb + fit.value("beta_spread") * o.spread +
           fit.value("beta_impact") * o.risk * powx(o.participation, fit.value("gamma1"));
}

ToyDoublePrime toy_match_endpoints(const ToyPrime& p)
{
    if (!(p.x_tilde > 0.0 && p.x_tilde < p.x_plus))
        throw InvalidParams("toy transform needs 0 < x_tilde < x_plus");
    return {p.s, p.alpha * (p.x_plus - p.x_tilde) / p.x_plus, p.x_plus};
}

ToyPrime toy_match_endpoints_inverse(const ToyDoublePrime& p, double x_tilde)
{
    if (!(x_tilde > 0.0 && x_tilde < p.x_plus))
        throw InvalidParams("toy transform needs 0 < x_tilde < x_plus");
    return {p.s, p.alpha * p.x_plus / (p.x_plus - x_tilde), x_tilde, p.x_plus};
}

ToyDoublePrime toy_ols_projection(const ToyPrime& p)
{
    if (!(p.x_tilde > 0.0 && p.x_tilde < p.x_plus))
        throw InvalidParams("toy transform needs 0 < x_tilde < x_plus");
    const double r = p.x_tilde / p.x_plus;
    const double s = p.s - p.alpha * p.x_tilde * (1.0 - r) * (1.0 - r);
    const double a = p.alpha * (1.0 + 2.0 * r * r * r - 3.0 * r * r);
    return {s, a, p.x_plus};
}

ToyPrime toy_ols_projection_inverse(const ToyDoublePrime& p, double x_tilde)
{
    if (!(x_tilde > 0.0 && x_tilde < p.x_plus))
        throw InvalidParams("toy transform needs 0 < x_tilde < x_plus");
    const double xp3 = p.x_plus * p.x_plus * p.x_plus;
    const double a = p.alpha * xp3 / (xp3 + 2.0 * x_tilde * x_tilde * x_tilde - 3.0 * x_tilde * x_tilde * p.x_plus);
    const double r = x_tilde / p.x_plus;
    return {p.s + a * x_tilde * (1.0 - r) * (1.0 - r), a, x_tilde, p.x_plus};
}

std::vector<TradeObservation> synthetic_trades(const SyntheticModel& m, std::size_t n, double noise,
                                               std::uint64_t seed)
{
    if (!(m.participation_lo > 0.0 && m.participation_hi >= m.participation_lo))
        throw InvalidParams("synthetic participation range must be positive and ordered");
    Rng rng(seed);
    const double llo = std::log(m.participation_lo), lhi = std::log(m.participation_hi);
    std::vector<TradeObservation> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        TradeObservation o;
        o.security_id = "S" + std::to_string(i % std::max<std::size_t>(m.securities, 1));
        o.spread = rng.uniform(m.spread_lo, m.spread_hi);
        o.risk = rng.uniform(m.risk_lo, m.risk_hi);
        o.participation = std::exp(rng.uniform(llo, lhi));
        o.cost = m.c_beta + m.beta_spread * o.spread + m.beta_impact * o.risk * std::pow(o.participation, m.gamma1);
        if (noise > 0.0)
            o.cost += noise * rng.normal();
        out.push_back(std::move(o));
    }
    return out;
}

double synthetic_participation_cdf(const SyntheticModel& m, double x)
{
    if (x <= m.participation_lo)
        return 0.0;
    if (x >= m.participation_hi)
        return 1.0;
    return (std::log(x) - std::log(m.participation_lo)) /
           (std::log(m.participation_hi) - std::log(m.participation_lo));
}

}  // namespace lst
