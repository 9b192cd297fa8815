#pragma once

/**
 * @file log_value.hpp
 * @brief Signed log-magnitude scalars for overflow-safe products and sums.
 *
 * Endpoint analysis of singular Sturm-Liouville problems routinely multiplies
 * solution samples whose magnitudes span thousands of orders of magnitude
 * (e.g. exp(+2/x) against x^8 near x = 0).  A LogValue stores a sign in
 * {-1, 0, +1} together with log|value|, so products and quotients reduce to
 * additions of log-magnitudes, and sums use the max-shift rule
 *
 *     a + b = sign * exp(M + log|s_a e^{la-M} + s_b e^{lb-M}|),  M = max(la, lb),
 *
 * which is exact to working precision whenever the exponents are comparable
 * and never overflows when they are not.  Conversion back to double is exact
 * (to double rounding) whenever |log-magnitude| stays below ~700.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace slreg {

struct LogValue {
    // sign in {-1, 0, +1}; lg = log(|value|), ignored when sign == 0.
    int sign = 0;
    double lg = -std::numeric_limits<double>::infinity();

    constexpr LogValue() = default;
    constexpr LogValue(int s, double l) : sign(s), lg(l) {}

    static LogValue zero() { return LogValue(); }
    static LogValue one() { return LogValue(1, 0.0); }

    static LogValue from_double(double v) {
        if (v == 0.0) return LogValue();
        if (std::isnan(v)) throw std::invalid_argument("LogValue: NaN input");
        return LogValue(v > 0 ? 1 : -1, std::log(std::abs(v)));
    }

    /// Build from a sign and a log-magnitude directly (sign may carry any
    /// nonzero value; it is collapsed to +-1).
    static LogValue from_log(double s, double logmag) {
        if (s == 0.0) return LogValue();
        return LogValue(s > 0 ? 1 : -1, logmag);
    }

    bool is_zero() const { return sign == 0; }
    bool is_finite() const { return sign == 0 || std::isfinite(lg); }

    double to_double() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(lg);
    }

    /// value / exp(shift), for rendering enormous quantities at a common scale.
    double to_double_shifted(double shift) const {
        if (sign == 0) return 0.0;
        return sign * std::exp(lg - shift);
    }

    LogValue operator-() const { return LogValue(-sign, lg); }
    LogValue abs() const { return LogValue(sign == 0 ? 0 : 1, lg); }

    friend LogValue operator*(const LogValue& a, const LogValue& b) {
        if (a.sign == 0 || b.sign == 0) return LogValue();
        return LogValue(a.sign * b.sign, a.lg + b.lg);
    }
    friend LogValue operator/(const LogValue& a, const LogValue& b) {
        if (b.sign == 0) throw std::domain_error("LogValue: division by zero");
        if (a.sign == 0) return LogValue();
        return LogValue(a.sign * b.sign, a.lg - b.lg);
    }
    friend LogValue operator+(const LogValue& a, const LogValue& b) {
        if (a.sign == 0) return b;
        if (b.sign == 0) return a;
        const double m = std::max(a.lg, b.lg);
        const double s = a.sign * std::exp(a.lg - m) + b.sign * std::exp(b.lg - m);
        if (s == 0.0) return LogValue();
        return LogValue(s > 0 ? 1 : -1, m + std::log(std::abs(s)));
    }
    friend LogValue operator-(const LogValue& a, const LogValue& b) { return a + (-b); }

    LogValue& operator*=(const LogValue& o) { *this = *this * o; return *this; }
    LogValue& operator+=(const LogValue& o) { *this = *this + o; return *this; }
    LogValue& operator-=(const LogValue& o) { *this = *this - o; return *this; }
    LogValue& operator/=(const LogValue& o) { *this = *this / o; return *this; }

    /// Integer power (sign-correct for negative bases).
    LogValue pow_int(long n) const {
        if (sign == 0) {
            if (n <= 0) throw std::domain_error("LogValue: 0 to non-positive power");
            return LogValue();
        }
        const int s = (sign < 0 && (n % 2 != 0)) ? -1 : 1;
        return LogValue(s, lg * static_cast<double>(n));
    }

    /// Real power; requires a positive base.
    LogValue pow_real(double e) const {
        if (sign == 0) {
            if (e <= 0) throw std::domain_error("LogValue: 0 to non-positive power");
            return LogValue();
        }
        if (sign < 0) throw std::domain_error("LogValue: real power of negative value");
        return LogValue(1, lg * e);
    }

    /// |a| < |b| in magnitude.
    static bool mag_less(const LogValue& a, const LogValue& b) {
        if (a.sign == 0) return b.sign != 0;
        if (b.sign == 0) return false;
        return a.lg < b.lg;
    }

    friend std::ostream& operator<<(std::ostream& os, const LogValue& v) {
        if (v.sign == 0) return os << "0";
        return os << (v.sign < 0 ? "-" : "+") << "exp(" << v.lg << ")";
    }
};

inline LogValue log_abs_sum(const LogValue& a, const LogValue& b) { return a.abs() + b.abs(); }

/// Relative difference of two nonzero values measured on their log-magnitudes:
/// |log|a| - log|b|| / max(1, |log|b||).  Used by closed-form comparisons that
/// must stay meaningful across hundreds of orders of magnitude.
inline double log_relative_diff(const LogValue& a, const LogValue& b) {
    if (a.sign == 0 || b.sign == 0) return (a.sign == b.sign) ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(a.lg - b.lg) / std::max(1.0, std::abs(b.lg));
}

/// Plain relative difference |a-b|/|b| evaluated stably in log space.
inline double rel_diff(const LogValue& a, const LogValue& b) {
    if (b.sign == 0) return a.sign == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    LogValue d = a - b;
    if (d.sign == 0) return 0.0;
    return std::exp(d.lg - b.lg);
}

/**
 * Complex value stored as unit * exp(lg) with |unit| kept in [1/2, 2).
 * Used by complex shooting for Weyl m-functions, where solutions can decay
 * or grow exponentially across the interval.
 */
struct CLogValue {
    std::complex<double> unit{0.0, 0.0};
    double lg = -std::numeric_limits<double>::infinity();

    CLogValue() = default;
    CLogValue(std::complex<double> u, double l) : unit(u), lg(l) { normalize(); }

    static CLogValue from_complex(std::complex<double> v) {
        if (v == std::complex<double>(0.0, 0.0)) return CLogValue();
        return CLogValue(v, 0.0);
    }
    static CLogValue from_log(const LogValue& v) {
        if (v.sign == 0) return CLogValue();
        CLogValue r;
        r.unit = std::complex<double>(static_cast<double>(v.sign), 0.0);
        r.lg = v.lg;
        return r;
    }

    bool is_zero() const { return unit == std::complex<double>(0.0, 0.0); }

    void normalize() {
        const double m = std::abs(unit);
        if (m == 0.0) { lg = -std::numeric_limits<double>::infinity(); return; }
        if (m < 0.5 || m >= 2.0) {
            lg += std::log(m);
            unit /= m;
        }
    }

    std::complex<double> to_complex() const {
        if (is_zero()) return {0.0, 0.0};
        return unit * std::exp(lg);
    }
    std::complex<double> to_complex_shifted(double shift) const {
        if (is_zero()) return {0.0, 0.0};
        return unit * std::exp(lg - shift);
    }
    double log_mag() const { return is_zero() ? -std::numeric_limits<double>::infinity() : lg + std::log(std::abs(unit)); }

    friend CLogValue operator*(const CLogValue& a, const CLogValue& b) {
        if (a.is_zero() || b.is_zero()) return CLogValue();
        return CLogValue(a.unit * b.unit, a.lg + b.lg);
    }
    friend CLogValue operator/(const CLogValue& a, const CLogValue& b) {
        if (b.is_zero()) throw std::domain_error("CLogValue: division by zero");
        if (a.is_zero()) return CLogValue();
        return CLogValue(a.unit / b.unit, a.lg - b.lg);
    }
    friend CLogValue operator+(const CLogValue& a, const CLogValue& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const double m = std::max(a.lg, b.lg);
        const std::complex<double> s = a.unit * std::exp(a.lg - m) + b.unit * std::exp(b.lg - m);
        if (s == std::complex<double>(0.0, 0.0)) return CLogValue();
        return CLogValue(s, m);
    }
    friend CLogValue operator-(const CLogValue& a, const CLogValue& b) {
        return a + CLogValue(-b.unit, b.lg);
    }
    CLogValue operator-() const { return CLogValue(-unit, lg); }

    friend CLogValue operator*(const std::complex<double>& c, const CLogValue& v) {
        return CLogValue::from_complex(c) * v;
    }
    friend CLogValue operator*(const CLogValue& v, const std::complex<double>& c) {
        return CLogValue::from_complex(c) * v;
    }
};

} // namespace slreg
