#pragma once

/**
 * @file limits.hpp
 * @brief Endpoint limit classification for sequences sampled on geometric grids.
 *
 * The regularization-index machinery repeatedly needs the value of
 * lim_{x -> endpoint} g(x) where g is known only through samples g(x_i) on a
 * geometric sequence of points x_i approaching the endpoint.  On such grids
 * the generic behaviours become linear structures in the level index i:
 *
 *   - g ~ C d^s  (d = distance to the endpoint):  log|g(x_i)| is affine in i,
 *     with slope s log(1/sigma); s > 0 means the limit is 0, s < 0 infinite.
 *   - g -> L != 0:  log|g| flattens; Aitken acceleration of g(x_i) gives L.
 *   - g ~ 1/(A + B i) (a reciprocal log divergence, the borderline case where
 *     an index formula lands exactly on an integer): 1/|g(x_i)| is affine and
 *     increasing in i, so the limit is 0 although log|g| has vanishing slope.
 *   - g ~ A + B i: affine and increasing, so the limit is infinite even
 *     though each successive ratio tends to 1.
 *
 * The classifier checks these models in an order that keeps the borderline
 * log cases from masquerading as finite limits.
 */

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "slreg/log_value.hpp"
#include "slreg/quadrature.hpp"

namespace slreg {

enum class LimitClass { Zero, Finite, Infinite, Oscillatory, Inconclusive };

inline const char* limit_class_name(LimitClass c) {
    switch (c) {
        case LimitClass::Zero: return "zero";
        case LimitClass::Finite: return "finite";
        case LimitClass::Infinite: return "infinite";
        case LimitClass::Oscillatory: return "oscillatory";
        case LimitClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct LimitEstimate {
    LimitClass cls = LimitClass::Inconclusive;
    double value = 0.0;    ///< the limit when cls == Finite
    double rate = 0.0;     ///< d^rate approach speed for Zero / d^{-rate} blowup for Infinite (power model)
    double quality = 0.0;  ///< smaller is better: fit rms or extrapolation drift
    std::string model;     ///< which structural model matched
};

/// One step of Aitken's delta-squared acceleration; returns the accelerated
/// tail value of the sequence (or the last element when acceleration is unsafe).
inline double aitken_extrapolate(const std::vector<double>& s, double* drift = nullptr) {
    if (s.size() < 3) {
        if (drift) *drift = std::numeric_limits<double>::infinity();
        return s.empty() ? 0.0 : s.back();
    }
    std::vector<double> acc;
    for (std::size_t i = 0; i + 2 < s.size(); ++i) {
        const double d1 = s[i + 1] - s[i];
        const double d2 = s[i + 2] - s[i + 1];
        const double denom = d2 - d1;
        if (std::abs(denom) < 1e-300 * (std::abs(d1) + std::abs(d2)) || denom == 0.0)
            acc.push_back(s[i + 2]);
        else
            acc.push_back(s[i + 2] - d2 * d2 / denom);
    }
    if (drift) {
        double dr = 0.0;
        const double ref = std::max(1e-300, std::abs(acc.back()));
        for (std::size_t i = acc.size() >= 3 ? acc.size() - 3 : 0; i + 1 < acc.size(); ++i)
            dr = std::max(dr, std::abs(acc[i + 1] - acc[i]) / ref);
        *drift = dr;
    }
    return acc.back();
}

namespace limit_detail {

/// Significance test for "z is affine and increasing in i" on positive data.
/// Returns true when the affine slope is positive, explains the data well and
/// dominates the residual over the window.
inline bool affine_increasing(const std::vector<double>& idx, const std::vector<double>& z,
                              double* quality) {
    if (idx.size() < 5) return false;
    const auto fit = quad_detail::fit_affine(idx, z);
    const double span = fit.c1 * (idx.back() - idx.front());
    double zmax = 0;
    for (double v : z) zmax = std::max(zmax, std::abs(v));
    if (fit.c1 <= 0 || zmax == 0) return false;
    const bool significant = span > 5.0 * fit.rms && span > 0.15 * zmax;
    if (significant && quality) *quality = fit.rms / std::max(1e-300, zmax);
    return significant;
}

} // namespace limit_detail

/**
 * Classify the endpoint limit of a sequence sampled at successive depth levels
 * of a geometric grid with ratio `sigma` (deeper = later entries).
 * `window` caps how many of the deepest usable entries participate.
 */
inline LimitEstimate classify_limit(const std::vector<LogValue>& seq, double sigma,
                                    int window = 12) {
    LimitEstimate out;
    const int n = static_cast<int>(seq.size());
    int end = n;
    // Zeros at depth: either the sequence is eventually exactly zero, or the
    // data is unusable.
    int zeros_at_depth = 0;
    while (end > 0 && seq[end - 1].sign == 0) { --end; ++zeros_at_depth; }
    if (end == 0) {
        out.cls = LimitClass::Zero;
        out.model = "identically-zero";
        return out;
    }
    if (zeros_at_depth > 2) {
        out.model = "trailing-zeros";
        return out;
    }
    int begin = std::max(0, end - window);
    std::vector<double> idx, lg;
    std::vector<int> sign;
    for (int i = begin; i < end; ++i) {
        if (seq[i].sign == 0) continue;
        idx.push_back(static_cast<double>(i + 1));
        lg.push_back(seq[i].lg);
        sign.push_back(seq[i].sign);
    }
    if (idx.size() < 5) {
        out.model = "short-window";
        return out;
    }

    int flips = 0;
    for (std::size_t i = 1; i < sign.size(); ++i)
        if (sign[i] != sign[i - 1]) ++flips;

    const double level_scale = std::log(1.0 / sigma);
    const auto yfit = quad_detail::fit_affine(idx, lg);
    const double beta = yfit.c1;

    if (flips >= 2) {
        if (beta < -0.5 * level_scale) {
            out.cls = LimitClass::Zero;
            out.rate = -beta / level_scale;
            out.quality = yfit.rms;
            out.model = "oscillating-decay";
        } else {
            out.cls = LimitClass::Oscillatory;
            out.model = "sign-flips";
            out.quality = static_cast<double>(flips);
        }
        return out;
    }

    // Curvature of log-magnitudes: strong curvature disqualifies the pure
    // power model and sends us to the structural (affine) tests.
    double curv = 0.0;
    for (std::size_t i = 2; i < lg.size(); ++i)
        curv = std::max(curv, std::abs((lg[i] - lg[i - 1]) - (lg[i - 1] - lg[i - 2])));

    const double strong = 0.3 * level_scale;
    if (beta < -strong && curv < 0.5 * std::abs(beta)) {
        out.cls = LimitClass::Zero;
        out.rate = -beta / level_scale;
        out.quality = yfit.rms / std::max(1.0, std::abs(beta) * idx.size());
        out.model = "power";
        return out;
    }
    if (beta > strong && curv < 0.5 * std::abs(beta)) {
        out.cls = LimitClass::Infinite;
        out.rate = beta / level_scale;
        out.quality = yfit.rms / std::max(1.0, std::abs(beta) * idx.size());
        out.model = "power";
        return out;
    }

    // Borderline log models need plain (shifted) values; only meaningful when
    // magnitudes are renderable.
    double lg_abs_max = 0;
    for (double l : lg) lg_abs_max = std::max(lg_abs_max, std::abs(l));
    if (lg_abs_max < 600.0) {
        std::vector<double> direct, recip;
        direct.reserve(lg.size());
        recip.reserve(lg.size());
        for (std::size_t i = 0; i < lg.size(); ++i) {
            direct.push_back(std::exp(lg[i]));
            recip.push_back(std::exp(-lg[i]));
        }
        double quality = 0.0;
        if (limit_detail::affine_increasing(idx, recip, &quality)) {
            out.cls = LimitClass::Zero;
            out.rate = 0.0;
            out.quality = quality;
            out.model = "reciprocal-affine";
            return out;
        }
        if (limit_detail::affine_increasing(idx, direct, &quality)) {
            out.cls = LimitClass::Infinite;
            out.rate = 0.0;
            out.quality = quality;
            out.model = "affine";
            return out;
        }
    }

    // Flat magnitude, stable sign: a genuine finite nonzero limit.
    if (std::abs(beta) <= 0.5 * strong && lg_abs_max < 600.0) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < lg.size(); ++i)
            vals.push_back(sign[i] * std::exp(lg[i]));
        double drift = 0.0;
        const double L = aitken_extrapolate(vals, &drift);
        const double spread = std::abs(vals.back() - vals.front()) / std::max(1e-300, std::abs(L));
        if (std::abs(L) > 0 && drift < 0.2) {
            out.cls = LimitClass::Finite;
            out.value = L;
            out.quality = std::max(drift, 0.02 * spread);
            out.model = "aitken";
            return out;
        }
    }

    // Weak residual trends: decide by the sign of the slope if it at least
    // persists across the window ends.
    const double drop = lg.back() - lg.front();
    if (drop < -3.0 && beta < 0) {
        out.cls = LimitClass::Zero;
        out.rate = -beta / level_scale;
        out.quality = 1.0;
        out.model = "weak-trend";
        return out;
    }
    if (drop > 3.0 && beta > 0) {
        out.cls = LimitClass::Infinite;
        out.rate = beta / level_scale;
        out.quality = 1.0;
        out.model = "weak-trend";
        return out;
    }
    out.model = "no-model";
    return out;
}

} // namespace slreg
