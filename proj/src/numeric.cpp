#include "lst/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "lst/core.hpp"

namespace lst {

double Rng::uniform()
{
    // 53 random bits, shifted by half an ulp so 0 is never returned.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt)
{
    const std::size_t n = x0.size();
    if (n == 0)
        throw InvalidParams("nelder_mead needs at least one parameter");

    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = x0[i] != 0.0 ? opt.initial_step * std::abs(x0[i]) : opt.initial_step;
        simplex[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i)
        fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult res;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
        const double fspread = std::abs(fv[worst] - fv[best]);
        const bool flat = std::isfinite(fv[worst]) && fspread <= opt.ftol * (std::abs(fv[best]) + 1e-12);
        if (spread <= opt.xtol || (flat && spread <= 1e-6)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k)
            if (k != worst)
                for (std::size_t j = 0; j < n; ++j)
                    centroid[j] += simplex[k][j] / static_cast<double>(n);

        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return p;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = std::move(xc);
            fv[worst] = fc;
            continue;
        }
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
            fv[k] = eval(simplex[k]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.fx = fv[best];
    res.iterations = it;
    return res;
}

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y)
{
    const auto n = X.rows();
    const auto k = X.cols();
    if (n != y.size())
        throw InputError("ols: design matrix and response have different lengths");
    if (n < k || k == 0)
        throw InputError("ols: not enough observations for the number of regressors");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-12);
    if (qr.rank() < k)
        throw NumericalError("ols: design matrix is rank deficient");

    OlsResult r;
    r.coef = qr.solve(y);
    r.fitted = X * r.coef;
    r.ssr = (y - r.fitted).squaredNorm();
    r.dof = static_cast<int>(n - k);
    r.sigma2 = r.dof > 0 ? r.ssr / r.dof : 0.0;

    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::MatrixXd inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    r.cov = r.sigma2 * inv;
    r.stderr_ = r.cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    r.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    return r;
}

double quantile_sorted(std::span<const double> sorted, double alpha)
{
    if (sorted.empty())
        throw InputError("quantile of an empty sample");
    if (alpha <= 0.0)
        return sorted.front();
    if (alpha >= 1.0)
        return sorted.back();
    const double pos = alpha * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double alpha)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, alpha);
}

double mean(std::span<const double> values)
{
    if (values.empty())
        throw InputError("mean of an empty sample");
    return compensated_sum(values) / static_cast<double>(values.size());
}

double variance(std::span<const double> values)
{
    if (values.size() < 2)
        return 0.0;
    const double m = mean(values);
    CompensatedSum s;
    for (double v : values)
        s += (v - m) * (v - m);
    return s.value() / static_cast<double>(values.size() - 1);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace lst
