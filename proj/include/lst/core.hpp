// Shared units, constants and error types for the liquidity stress engine.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lst {

/// Trading days per year. Used for volatility de-annualization and for
/// converting return times expressed in years.
inline constexpr double kTradingDaysPerYear = 260.0;

inline constexpr double kBasisPoint = 1e-4;

constexpr double from_bps(double v) { return v * kBasisPoint; }
constexpr double to_bps(double fraction) { return fraction / kBasisPoint; }
constexpr double from_pct(double v) { return v / 100.0; }
constexpr double to_pct(double fraction) { return fraction * 100.0; }

inline double years_to_days(double years) { return years * kTradingDaysPerYear; }

// Errors. Everything derives from lst::Error so callers (the CLI in
// particular) can map families of failures onto exit codes.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violate a documented invariant (x_tilde > x_plus, negative scale...).
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// A field required by the selected risk measure or participation basis is absent.
class MissingField : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (files, dimensions, empty samples).
class InputError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: an optimizer did not converge or a design matrix is singular.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Arithmetic was attempted on a prohibitive (infinite) unit cost.
class ProhibitiveCostError : public Error {
public:
    using Error::Error;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            carry_ += (sum_ - t) + v;
        else
            carry_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double v)
    {
        add(v);
        return *this;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> values)
{
    CompensatedSum s;
    for (double v : values)
        s.add(v);
    return s.value();
}

}  // namespace lst
