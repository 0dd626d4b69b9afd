#include "lst/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lst/numeric.hpp"

namespace lst {

namespace {

constexpr double kShapeEps = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool near_zero(double xi) { return std::abs(xi) < kShapeEps; }

void require_nondegenerate(std::span<const double> x, const char* what)
{
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi)))
        throw InputError(what);
}

}  // namespace

double gev_cdf(double x, const GevParams& p)
{
    const double z = (x - p.mu) / p.sigma;
    if (near_zero(p.xi))
        return std::exp(-std::exp(-z));
    const double t = 1.0 + p.xi * z;
    if (t <= 0.0)
        return p.xi > 0.0 ? 0.0 : 1.0;
    return std::exp(-std::pow(t, -1.0 / p.xi));
}

double gev_quantile(double prob, const GevParams& p)
{
    if (!(prob > 0.0 && prob < 1.0))
        throw InvalidParams("GEV quantile probability must lie in (0, 1)");
    const double y = -std::log(prob);
    if (near_zero(p.xi))
        return p.mu - p.sigma * std::log(y);
    return p.mu - p.sigma / p.xi * (1.0 - std::pow(y, -p.xi));
}

double gev_loglik(std::span<const double> x, const GevParams& p)
{
    if (!(p.sigma > 0.0))
        return kNegInf;
    const double n = static_cast<double>(x.size());
    CompensatedSum acc;
    if (near_zero(p.xi)) {
        for (double v : x) {
            const double z = (v - p.mu) / p.sigma;
            acc += -z - std::exp(-z);
        }
    } else {
        const double a = 1.0 + 1.0 / p.xi;
        for (double v : x) {
            const double t = 1.0 + p.xi * (v - p.mu) / p.sigma;
            if (t <= 0.0)
                return kNegInf;
            const double lt = std::log(t);
            acc += -a * lt - std::exp(-lt / p.xi);
        }
    }
    return -n * std::log(p.sigma) + acc.value();
}

double gpd_cdf(double y, double sigma, double xi)
{
    if (y <= 0.0)
        return 0.0;
    if (near_zero(xi))
        return 1.0 - std::exp(-y / sigma);
    const double t = 1.0 + xi * y / sigma;
    if (t <= 0.0)
        return 1.0;
    return 1.0 - std::pow(t, -1.0 / xi);
}

double gpd_quantile(double prob, double sigma, double xi)
{
    if (!(prob >= 0.0 && prob < 1.0))
        throw InvalidParams("GPD quantile probability must lie in [0, 1)");
    if (near_zero(xi))
        return -sigma * std::log1p(-prob);
    return sigma / xi * (std::pow(1.0 - prob, -xi) - 1.0);
}

double gpd_loglik(std::span<const double> y, double sigma, double xi)
{
    if (!(sigma > 0.0))
        return kNegInf;
    const double n = static_cast<double>(y.size());
    CompensatedSum acc;
    if (near_zero(xi)) {
        for (double v : y)
            acc += -v / sigma;
    } else {
        for (double v : y) {
            const double t = 1.0 + xi * v / sigma;
            if (t <= 0.0)
                return kNegInf;
            acc += -(1.0 + 1.0 / xi) * std::log(t);
        }
    }
    return -n * std::log(sigma) + acc.value();
}

std::vector<double> block_maxima(std::span<const double> series, int block_len)
{
    if (block_len < 1)
        throw InvalidParams("block length must be at least one");
    const auto len = static_cast<std::size_t>(block_len);
    if (series.size() < len)
        throw InputError("series is shorter than one block");
    std::vector<double> out;
    out.reserve(series.size() / len);
    for (std::size_t b = 0; b + len <= series.size(); b += len)
        out.push_back(*std::max_element(series.begin() + static_cast<std::ptrdiff_t>(b),
                                        series.begin() + static_cast<std::ptrdiff_t>(b + len)));
    return out;
}

GevParams gev_pwm(std::span<const double> maxima)
{
    if (maxima.size() < 3)
        throw InputError("PWM needs at least three maxima");
    std::vector<double> x(maxima.begin(), maxima.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double j = static_cast<double>(i);
        b0 += x[i];
        b1 += j / (n - 1.0) * x[i];
        b2 += j * (j - 1.0) / ((n - 1.0) * (n - 2.0)) * x[i];
    }
    b0 /= n;
    b1 /= n;
    b2 /= n;

    // Hosking's approximation; his shape k is the negative of xi.
    const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
    double k = 7.8590 * c + 2.9554 * c * c;
    k = std::clamp(k, -0.9, 0.9);
    GevParams p;
    if (std::abs(k) < 1e-6) {
        p.sigma = (2.0 * b1 - b0) / std::numbers::ln2;
        p.mu = b0 - std::numbers::egamma * p.sigma;
        p.xi = 0.0;
    } else {
        const double g = std::tgamma(1.0 + k);
        p.sigma = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
        p.mu = b0 + p.sigma * (g - 1.0) / k;
        p.xi = -k;
    }
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
        p.sigma = std::sqrt(6.0 * variance(x)) / std::numbers::pi;
    return p;
}

GevFit fit_gev(std::span<const double> maxima, std::size_t min_blocks)
{
    if (maxima.size() < min_blocks)
        throw InputError("GEV fit needs at least " + std::to_string(min_blocks) + " block maxima");
    require_nondegenerate(maxima, "GEV fit on a sample with zero variance");

    const GevParams init = gev_pwm(maxima);
    auto objective = [&](std::span<const double> v) {
        if (v[2] <= -1.0)
            return std::numeric_limits<double>::infinity();
        return -gev_loglik(maxima, GevParams{v[0], std::exp(v[1]), v[2]});
    };

    GevFit fit;
    fit.block_count = maxima.size();
    fit.initial_loglik = gev_loglik(maxima, init);

    std::vector<double> start{init.mu, std::log(init.sigma), init.xi};
    // A zero initial shape would give the simplex no scale to step with.
    if (std::abs(start[2]) < 0.05)
        start[2] = 0.05;
    NelderMeadOptions opt;
    opt.max_iter = 20000;
    opt.initial_step = 0.2;
    auto res = nelder_mead(objective, start, opt);
    // Restarting from the optimum rebuilds a fresh simplex and guards
    // against early collapse.
    for (int restart = 0; restart < 3; ++restart) {
        auto again = nelder_mead(objective, res.x, opt);
        const bool improved = again.fx < res.fx - 1e-10 * std::abs(res.fx);
        res.iterations += again.iterations;
        if (again.fx <= res.fx)
            res = {again.x, again.fx, res.iterations, again.converged};
        if (!improved)
            break;
    }
    if (!std::isfinite(res.fx))
        throw NumericalError("GEV likelihood search did not reach a feasible point");

    fit.iterations = res.iterations;
    if (-res.fx >= fit.initial_loglik) {
        fit.params = GevParams{res.x[0], std::exp(res.x[1]), res.x[2]};
        fit.loglik = -res.fx;
    } else {
        fit.params = init;
        fit.loglik = fit.initial_loglik;
    }
    if (!res.converged && !std::isfinite(fit.loglik))
        throw NumericalError("GEV likelihood search did not converge");
    return fit;
}

StressValue gev_stress(const GevParams& p, int block_len, double return_time)
{
    if (!(return_time > block_len))
        throw InvalidParams("return time must exceed the block length");
    const double alpha = 1.0 - static_cast<double>(block_len) / return_time;
    return {return_time, gev_quantile(alpha, p)};
}

std::vector<MrlPoint> mean_residual_life(std::span<const double> series, std::size_t grid_points)
{
    if (series.empty())
        throw InputError("mean residual life of an empty series");
    std::vector<double> x(series.begin(), series.end());
    std::sort(x.begin(), x.end());
    const double lo = x.front();
    const double hi = x.size() >= 3 ? x[x.size() - 3] : x.back();
    const std::size_t m = std::max<std::size_t>(grid_points, 2);

    std::vector<MrlPoint> out;
    out.reserve(m);
    for (std::size_t g = 0; g < m; ++g) {
        const double u = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(m - 1);
        const auto first = std::upper_bound(x.begin(), x.end(), u);
        const auto k = static_cast<std::size_t>(x.end() - first);
        CompensatedSum s;
        for (auto it = first; it != x.end(); ++it)
            s += *it - u;
        out.push_back({u, k > 0 ? s.value() / static_cast<double>(k) : 0.0, k});
    }
    return out;
}

ThresholdSuggestion suggest_threshold(const std::vector<MrlPoint>& mrl, double r2_target, std::size_t min_points)
{
    ThresholdSuggestion r;
    r.method = "heuristic: first grid point whose tail segment has linear-fit R^2 >= " + std::to_string(r2_target);
    for (std::size_t k = 0; k + min_points <= mrl.size(); ++k) {
        const std::size_t m = mrl.size() - k;
        double su = 0, se = 0;
        for (std::size_t j = k; j < mrl.size(); ++j) {
            su += mrl[j].u;
            se += mrl[j].mean_excess;
        }
        const double mu = su / static_cast<double>(m), me = se / static_cast<double>(m);
        double sxx = 0, sxy = 0, syy = 0;
        for (std::size_t j = k; j < mrl.size(); ++j) {
            const double du = mrl[j].u - mu, de = mrl[j].mean_excess - me;
            sxx += du * du;
            sxy += du * de;
            syy += de * de;
        }
        const double r2 = (sxx > 0 && syy > 0) ? sxy * sxy / (sxx * syy) : (syy == 0 ? 1.0 : 0.0);
        if (r2 >= r2_target) {
            r.u0 = mrl[k].u;
            r.r2 = r2;
            r.found = true;
            return r;
        }
    }
    return r;
}

GpdFit fit_gpd(std::span<const double> series, double u0, std::size_t min_exceed)
{
    std::vector<double> y;
    for (double v : series)
        if (v > u0)
            y.push_back(v - u0);
    if (y.size() < min_exceed)
        throw InputError("GPD fit needs at least " + std::to_string(min_exceed) + " exceedances, got " +
                         std::to_string(y.size()));
    require_nondegenerate(y, "GPD fit on exceedances with zero variance");

    // Method-of-moments seed.
    const double m = mean(y);
    const double v = variance(y);
    double xi0 = 0.5 * (1.0 - m * m / v);
    double s0 = 0.5 * m * (m * m / v + 1.0);
    xi0 = std::clamp(xi0, -0.45, 0.45);
    if (!(s0 > 0.0))
        s0 = m;

    GpdFit fit;
    fit.params.u0 = u0;
    fit.params.n = series.size();
    fit.params.n_exceed = y.size();
    fit.initial_loglik = gpd_loglik(y, s0, xi0);

    auto objective = [&](std::span<const double> p) {
        if (p[1] <= -1.0)
            return std::numeric_limits<double>::infinity();
        return -gpd_loglik(y, std::exp(p[0]), p[1]);
    };
    std::vector<double> start{std::log(s0), std::abs(xi0) < 0.05 ? 0.05 : xi0};
    NelderMeadOptions opt;
    opt.max_iter = 20000;
    opt.initial_step = 0.2;
    auto res = nelder_mead(objective, start, opt);
    for (int restart = 0; restart < 3; ++restart) {
        auto again = nelder_mead(objective, res.x, opt);
        const bool improved = again.fx < res.fx - 1e-10 * std::abs(res.fx);
        res.iterations += again.iterations;
        if (again.fx <= res.fx)
            res = {again.x, again.fx, res.iterations, again.converged};
        if (!improved)
            break;
    }
    if (!std::isfinite(res.fx))
        throw NumericalError("GPD likelihood search did not reach a feasible point");

    fit.iterations = res.iterations;
    if (-res.fx >= fit.initial_loglik) {
        fit.params.sigma = std::exp(res.x[0]);
        fit.params.xi = res.x[1];
        fit.loglik = -res.fx;
    } else {
        fit.params.sigma = s0;
        fit.params.xi = xi0;
        fit.loglik = fit.initial_loglik;
    }
    return fit;
}

StressValue gpd_stress(const GpdParams& p, double return_time)
{
    if (p.n_exceed == 0 || p.n == 0)
        throw InvalidParams("GPD parameters carry no sample counts");
    const double ratio = static_cast<double>(p.n) / static_cast<double>(p.n_exceed);
    if (return_time < ratio)
        throw InvalidParams("return time falls below the threshold level (T < n / n')");
    const double r = ratio / return_time;
    double v;
    if (near_zero(p.xi))
        v = p.u0 - p.sigma * std::log(r);
    else
        v = p.u0 + p.sigma / p.xi * (std::pow(r, -p.xi) - 1.0);
    return {return_time, v};
}

double semi_parametric_cdf(double x, const GpdParams& p)
{
    if (x < p.u0)
        throw InvalidParams("the parametric tail is only defined above the threshold");
    const double zeta = static_cast<double>(p.n_exceed) / static_cast<double>(p.n);
    return 1.0 - zeta * (1.0 - gpd_cdf(x - p.u0, p.sigma, p.xi));
}

FactorSample make_factor_sample(std::span<const double> series, int horizon, FactorKind kind)
{
    if (horizon < 1)
        throw InvalidParams("factor horizon must be at least one day");
    const auto h = static_cast<std::size_t>(horizon);
    if (series.size() <= h)
        throw InputError("series must be longer than the factor horizon");
    FactorSample s;
    s.horizon = horizon;
    s.kind = kind;
    s.values.reserve(series.size() - h);
    for (std::size_t t = 0; t + h < series.size(); ++t) {
        if (kind == FactorKind::Mult) {
            if (!(series[t] > 0.0) || !(series[t + h] > 0.0))
                throw InputError("multiplicative factors need strictly positive values");
            s.values.push_back(series[t + h] / series[t]);
        } else {
            s.values.push_back(series[t + h] - series[t]);
        }
    }
    return s;
}

FactorSample reciprocal(const FactorSample& s)
{
    if (s.kind != FactorKind::Mult)
        throw InvalidParams("reciprocal factors only exist for multiplicative samples");
    FactorSample r = s;
    for (double& v : r.values)
        v = 1.0 / v;
    return r;
}

FactorSample cross_section_aggregate(std::span<const FactorSample> samples, AggregationMode mode)
{
    if (samples.empty())
        throw InputError("cross-section aggregation needs at least one sample");
    FactorSample out;
    out.horizon = samples.front().horizon;
    out.kind = samples.front().kind;
    if (mode == AggregationMode::Pooling) {
        for (const auto& s : samples)
            out.values.insert(out.values.end(), s.values.begin(), s.values.end());
        return out;
    }
    const std::size_t len = samples.front().values.size();
    for (const auto& s : samples)
        if (s.values.size() != len)
            throw InputError("averaging needs samples aligned on the same dates");
    out.values.assign(len, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
        CompensatedSum acc;
        for (const auto& s : samples)
            acc += s.values[t];
        out.values[t] = acc.value() / static_cast<double>(samples.size());
    }
    return out;
}

std::vector<double> averaged_block_maxima(std::span<const FactorSample> samples, int block_len)
{
    if (samples.empty())
        throw InputError("block-maxima averaging needs at least one sample");
    std::vector<std::vector<double>> maxima;
    for (const auto& s : samples)
        maxima.push_back(block_maxima(s.values, block_len));
    const std::size_t blocks = maxima.front().size();
    for (const auto& m : maxima)
        if (m.size() != blocks)
            throw InputError("averaging needs samples aligned on the same dates");
    std::vector<double> out(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (const auto& m : maxima)
            out[b] += m[b];
        out[b] /= static_cast<double>(maxima.size());
    }
    return out;
}

double historical_alpha(int horizon, double return_time)
{
    if (!(return_time > 0.0))
        throw InvalidParams("return time must be positive");
    return 1.0 - static_cast<double>(horizon) / return_time;
}

std::optional<StressValue> historical_stress(const FactorSample& sample, double return_time)
{
    if (sample.values.empty())
        return std::nullopt;
    const double alpha = historical_alpha(sample.horizon, return_time);
    if (alpha < 0.0)
        return std::nullopt;
    // The sample resolves the quantile only if at least one observation lies beyond it.
    if (static_cast<double>(sample.values.size()) * (1.0 - alpha) < 1.0)
        return std::nullopt;
    return StressValue{return_time, quantile(sample.values, alpha)};
}

ConditionalStress conditional_stress(std::span<const double> p, const Eigen::MatrixXd& factors,
                                     std::span<const double> factor_stress)
{
    const auto n = static_cast<Eigen::Index>(p.size());
    const Eigen::Index m = factors.cols();
    if (factors.rows() != n && !(m == 0))
        throw InputError("factor matrix rows must match the parameter series");
    if (static_cast<Eigen::Index>(factor_stress.size()) != m)
        throw InputError("factor stress vector must have one entry per factor");
    if (n < m + 2)
        throw InputError("conditional stress needs at least m + 2 observations");

    Eigen::MatrixXd X(n, m + 1);
    X.col(0).setOnes();
    if (m > 0)
        X.rightCols(m) = factors;
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t)
        y(t) = p[static_cast<std::size_t>(t)];

    const OlsResult r = ols(X, y);
    ConditionalStress c;
    c.beta = r.coef;
    c.stderrs = r.stderr_;
    c.stressed = r.coef(0);
    for (Eigen::Index k = 0; k < m; ++k)
        c.stressed += r.coef(k + 1) * factor_stress[static_cast<std::size_t>(k)];
    return c;
}

std::vector<double> moving_average(std::span<const double> series, int window)
{
    if (window < 1)
        throw InvalidParams("moving-average window must be at least one");
    std::vector<double> out(series.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        acc += series[t];
        if (t >= static_cast<std::size_t>(window))
            acc -= series[t - static_cast<std::size_t>(window)];
        const auto count = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window));
        out[t] = acc / static_cast<double>(count);
    }
    return out;
}

std::vector<double> cross_sectional_median(std::span<const std::vector<double>> panel)
{
    if (panel.empty())
        return {};
    const std::size_t len = panel.front().size();
    for (const auto& row : panel)
        if (row.size() != len)
            throw InputError("cross-sectional median needs rows of equal length");
    std::vector<double> out(len), col(panel.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t i = 0; i < panel.size(); ++i)
            col[i] = panel[i][t];
        out[t] = quantile(col, 0.5);
    }
    return out;
}

}  // namespace lst
