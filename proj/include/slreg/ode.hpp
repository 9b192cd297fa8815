#pragma once

/**
 * @file ode.hpp
 * @brief Adaptive Dormand-Prince 5(4) integration with log-amplitude rescaling.
 *
 * Three consumers drive the requirements here:
 *  - base-solution construction integrates a Sturm-Liouville system from a
 *    point very deep inside a singularity outward, across dozens of orders of
 *    magnitude of solution amplitude;
 *  - Pruefer phase integration for eigenvalue counting (smooth, real, benign);
 *  - complex shooting for Weyl m-functions, where solutions grow or decay
 *    exponentially across the interval.
 *
 * All three are linear ODEs, so amplitude renormalization commutes with the
 * dynamics: the integrator exposes an optional callback invoked after each
 * accepted step that may rescale the state in place and return the log of the
 * factor it divided out; the accumulated log-shift is reported alongside the
 * final state.  Steps are error-controlled with the standard embedded 5(4)
 * pair, and integration targets an exact stop point (the final step is
 * clamped), with optional intermediate stop points recorded on the fly.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace slreg {

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-14;
    double initial_step = 0.0;          ///< 0: choose automatically
    double max_step = 0.0;              ///< 0: no cap
    std::size_t max_steps = 2'000'000;
    /// Optional post-step rescaling: may modify the state in place and return
    /// log(factor) that was divided out.
    std::function<double(double t, std::vector<double>& y)> renormalize;
};

struct OdeResult {
    std::vector<double> y;   ///< state at the end point (rescaled)
    double log_shift = 0.0;  ///< accumulated log of divided-out amplitude
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

/// Right-hand side: dy = f(t, y).
using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

namespace ode_detail {

inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

} // namespace ode_detail

/**
 * Integrate dy = f(t, y) from t0 to t1 (either direction).  `observe`, when
 * given, is called after every accepted step with (t, y, cumulative log shift)
 * and may be used to record dense output at step resolution.
 */
inline OdeResult integrate_ode(const OdeRhs& f, double t0, double t1, std::vector<double> y0,
                               const OdeOptions& opt = {},
                               const std::function<void(double, const std::vector<double>&, double)>&
                                   observe = nullptr) {
    using namespace ode_detail;
    const std::size_t n = y0.size();
    OdeResult res;
    res.y = std::move(y0);
    if (t0 == t1) return res;
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);
    f(t0, res.y, k1);

    double h = opt.initial_step;
    if (h == 0.0) {
        // Scale a first guess from the state/derivative balance.
        double ynorm = 0, fnorm = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ynorm = std::max(ynorm, std::abs(res.y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        h = (fnorm > 0) ? 0.01 * std::max(ynorm, opt.atol) / fnorm : 0.01 * span;
        h = std::min(h, 0.1 * span);
        if (h <= 0 || !std::isfinite(h)) h = 1e-6 * span;
    }
    if (opt.max_step > 0) h = std::min(h, opt.max_step);

    double t = t0;
    bool fsal_fresh = true;
    while (dir * (t1 - t) > 0) {
        if (res.steps + res.rejected > opt.max_steps)
            throw std::runtime_error("integrate_ode: step budget exhausted");
        h = std::min(h, std::abs(t1 - t));
        const double hs = dir * h;
        if (!fsal_fresh) f(t, res.y, k1);

        for (std::size_t i = 0; i < n; ++i) tmp[i] = res.y[i] + hs * a21 * k1[i];
        f(t + hs / 5, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = res.y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        f(t + 3 * hs / 10, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = res.y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + 4 * hs / 5, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = res.y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + 8 * hs / 9, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = res.y[i] +
                     hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + hs, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = res.y[i] +
                      hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + hs, ynew, k7);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(res.y[i]), std::abs(ynew[i]));
            if (!std::isfinite(ynew[i])) finite = false;
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / n);

        if (finite && err <= 1.0) {
            t += hs;
            res.y = ynew;
            k1 = k7; // first-same-as-last
            fsal_fresh = true;
            ++res.steps;
            if (opt.renormalize) {
                const double shift = opt.renormalize(t, res.y);
                if (shift != 0.0) {
                    res.log_shift += shift;
                    const double fac = std::exp(-shift);
                    for (auto& k : k1) k *= fac; // keep FSAL consistent with the rescaled state
                }
            }
            if (observe) observe(t, res.y, res.log_shift);
            const double grow = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, grow));
        } else {
            ++res.rejected;
            fsal_fresh = false;
            const double shrink = finite && err > 0 ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
            h *= std::min(0.9, shrink);
            // A step is hopeless only once it cannot advance t in floating point.
            if (h < 16 * std::numeric_limits<double>::epsilon() * std::abs(t))
                throw std::runtime_error("integrate_ode: step size underflow");
        }
        if (opt.max_step > 0) h = std::min(h, opt.max_step);
    }
    return res;
}

/**
 * Convenience driver that records the (rescaled) state at a given list of
 * stop points, integrating through them in order.  Stop points must be
 * monotone in the direction of integration; the first may equal t0.
 */
struct OdeTrace {
    std::vector<std::vector<double>> states;
    std::vector<double> log_shifts;
};

inline OdeTrace integrate_through(const OdeRhs& f, double t0, const std::vector<double>& stops,
                                  std::vector<double> y0, const OdeOptions& opt = {}) {
    OdeTrace trace;
    trace.states.reserve(stops.size());
    trace.log_shifts.reserve(stops.size());
    double t = t0;
    double carried = 0.0;
    std::vector<double> y = std::move(y0);
    for (double s : stops) {
        if (s == t) {
            trace.states.push_back(y);
            trace.log_shifts.push_back(carried);
            continue;
        }
        OdeResult leg = integrate_ode(f, t, s, std::move(y), opt);
        carried += leg.log_shift;
        y = std::move(leg.y);
        t = s;
        trace.states.push_back(y);
        trace.log_shifts.push_back(carried);
    }
    return trace;
}

/// Standard renormalizer: divide the state by its max-norm once it leaves
/// [1e-120, 1e+120], returning the log of the factor.
inline double renormalize_maxnorm(double, std::vector<double>& y) {
    double m = 0;
    for (double v : y) m = std::max(m, std::abs(v));
    if (m == 0.0 || (m > 1e-120 && m < 1e120)) return 0.0;
    const double lg = std::log(m);
    for (double& v : y) v /= m;
    return lg;
}

} // namespace slreg
