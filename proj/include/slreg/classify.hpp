#pragma once
/**
 * @file classify.hpp
 * @brief Endpoint classification for singular Sturm-Liouville expressions:
 *        nonoscillation, limit-circle vs. limit-point, integrability of the
 *        principal/nonprincipal pairing (the trace-class property), and the
 *        regularization index.
 *
 * Every decision here is made twice, by two independent numeric criteria
 * that must agree:
 *
 *  - The trace-class property pairs the integral test on |u v| r with the
 *    limit of the ratio of principal solutions taken at two different
 *    spectral points; the ratio has a finite nonzero endpoint limit exactly
 *    when the pairing weight is integrable.
 *  - The regularization index pairs the integrability scan of theta_0
 *    theta_n r (first convergent pairing at n = index) with the endpoint
 *    limit of phi_0 / theta_n (first non-vanishing limit at n = index + 1,
 *    after the ladder switches to its natural recursion).
 *
 * Disagreement between the criteria is reported as an inconclusive verdict
 * with both traces attached, never silently resolved.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slreg/catalog.hpp"
#include "slreg/grid.hpp"
#include "slreg/limits.hpp"
#include "slreg/log_value.hpp"
#include "slreg/ode.hpp"
#include "slreg/problem.hpp"
#include "slreg/quadrature.hpp"
#include "slreg/series.hpp"
#include "slreg/solutions.hpp"

namespace slreg {

// --- verdict vocabulary ------------------------------------------------------

/// Three-valued answer for yes/no questions that a finite computation may
/// legitimately fail to settle.
enum class Tri { Yes, No, Unknown };

inline const char* tri_name(Tri t) {
    switch (t) {
        case Tri::Yes: return "yes";
        case Tri::No: return "no";
        case Tri::Unknown: return "unknown";
    }
    return "?";
}

/// Verdict on the integrability of |u v| r at the endpoint (equivalently, on
/// the trace-class property of the resolvent difference the pairing controls).
enum class TraceClass { Holds, Fails, Inconclusive };

inline const char* trace_class_name(TraceClass t) {
    switch (t) {
        case TraceClass::Holds: return "holds";
        case TraceClass::Fails: return "fails";
        case TraceClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

enum class LcLp { LimitCircle, LimitPoint, Unknown };

inline const char* lc_lp_name(LcLp c) {
    switch (c) {
        case LcLp::LimitCircle: return "limit-circle";
        case LcLp::LimitPoint: return "limit-point";
        case LcLp::Unknown: return "unknown";
    }
    return "?";
}

/// Outcome of the regularization-index search.
enum class IndexKind {
    Finite,          ///< both criteria agree on a finite index
    InfiniteAtDepth, ///< no convergent pairing up to the search depth
    Undefined,       ///< the trace-class property fails; no index exists
    Unknown          ///< criteria disagree or the data is inconclusive
};

inline const char* index_kind_name(IndexKind k) {
    switch (k) {
        case IndexKind::Finite: return "finite";
        case IndexKind::InfiniteAtDepth: return "infinite-at-depth";
        case IndexKind::Undefined: return "undefined";
        case IndexKind::Unknown: return "unknown";
    }
    return "?";
}

struct IndexVerdict {
    IndexKind kind = IndexKind::Unknown;
    int value = -1; ///< the index when kind == Finite
    int depth = 0;  ///< ladder positions examined when kind == InfiniteAtDepth
};

/// One row of the per-criterion audit trail.
struct EvidenceItem {
    std::string criterion;
    int n = -1; ///< ladder position, -1 when not applicable
    std::string verdict;
    double fitted_rate = 0.0;
};

struct L2Entry {
    int n = 0;
    bool in_l2 = false;
};

/// Complete classification of one endpoint.
struct EndpointReport {
    Side side = Side::Left;
    Tri nonoscillatory = Tri::Unknown;
    LcLp lc_lp = LcLp::Unknown;
    TraceClass trace_class = TraceClass::Inconclusive;
    IndexVerdict index;
    std::vector<EvidenceItem> evidence;
    std::vector<L2Entry> l2_profile;
    /// Internal consistency violations (numerical faults), empty when clean.
    std::vector<std::string> faults;
};

struct ClassifyConfig {
    GridConfig grid{};
    double lambda_anchor = 0.0;
    int n_max = 8;       ///< index search depth cap
    double z_step = 1.0; ///< spacing of the comparison spectral points below the anchor
};

namespace classify_detail {

/// Geometry of the depth coordinate at one endpoint: x = base + orient * d.
struct DepthFrame {
    double base = 0.0;
    double orient = 1.0;

    static DepthFrame of(const EndpointGrid& grid) {
        DepthFrame f;
        if (grid.endpoint_infinite()) {
            f.base = 0.0;
            f.orient = (grid.side() == Side::Right) ? 1.0 : -1.0;
        } else {
            f.base = grid.endpoint();
            f.orient = (grid.anchor() > grid.endpoint()) ? 1.0 : -1.0;
        }
        return f;
    }

    double depth(double x) const { return std::abs(x - base); }
};

/// Coefficients of the endpoint equation written in the logarithmic depth
/// coordinate s = log d: eta'' - (1 - c1) eta' - c2 eta = 0, where eta(s) =
/// y(x(s)).  For power-type coefficients c1 and c2 tend to constants and the
/// roots of z^2 - (1 - c1) z - c2 are the local growth exponents.
struct SCoeffs {
    double c1 = 0.0;
    double c2 = 0.0;
};

inline SCoeffs s_coefficients(const SLProblem& prob, const DepthFrame& f, double lambda,
                              double x) {
    const double d = f.depth(x);
    const double p = prob.p_at(x);
    SCoeffs c;
    c.c1 = f.orient * d * prob.p.derivative(x) / p;
    c.c2 = d * d * (prob.q(x) - lambda * prob.r_at(x)) / p;
    return c;
}

/// Separation of the two local growth exponents at the deepest grid point.
/// Near zero the principal and nonprincipal directions are numerically
/// indistinguishable and an outward construction at that spectral point is
/// hopeless, however much extra depth is spent.
inline double deep_separation(const SLProblem& prob, const EndpointGrid& grid, double lambda) {
    const DepthFrame f = DepthFrame::of(grid);
    const SCoeffs c = s_coefficients(prob, f, lambda, grid.deepest());
    const double disc = (1.0 - c.c1) * (1.0 - c.c1) + 4.0 * c.c2;
    return std::sqrt(std::max(disc, 0.0));
}

/// Real part of a complex log-value as a signed log-value (for series
/// evaluations at real spectral points, where the imaginary part vanishes).
inline LogValue real_part_log(const CLogValue& v) {
    if (v.is_zero()) return LogValue();
    const double re = v.unit.real();
    if (re == 0.0) return LogValue();
    return LogValue::from_log(re > 0 ? 1.0 : -1.0, v.lg + std::log(std::abs(re)));
}

} // namespace classify_detail

// --- nonoscillation ----------------------------------------------------------

/**
 * Decide whether the expression is nonoscillatory at the endpoint for the
 * given spectral point: does every real solution of tau y = lambda y have
 * finitely many zeros near the endpoint?
 *
 * Two stages:
 *  1. Convexity shortcut.  In the depth coordinate s = log d the reduced
 *     equation is zeta'' = Phi(s) zeta with Phi = [(1-c1)^2 + 4 c2]/4 -
 *     c1'/2.  If Phi >= 0 at every sampled point of the deep half of the
 *     grid, solutions are convex where positive and cannot oscillate.  This
 *     settles all power-type endpoints, including the critically balanced
 *     ones where Phi -> 0.
 *  2. Zero counting.  Otherwise a Pruefer angle for the same reduced
 *     equation is integrated level by level toward the endpoint; the angle
 *     increases through each multiple of pi exactly at a zero of the
 *     solution, so the zero count per level is a difference of floors.  New
 *     zeros appearing in the deep half of the grid mean oscillation; a
 *     stable count means nonoscillation; an exhausted step budget leaves the
 *     question open.
 */
inline Tri nonoscillation_check(const SLProblem& prob, Side side, double anchor, double lambda,
                                const GridConfig& gcfg = {}) {
    const EndpointGrid grid(prob.interval, side, anchor, gcfg);
    const classify_detail::DepthFrame frame = classify_detail::DepthFrame::of(grid);
    const int L = grid.levels();
    const auto& pts = grid.points();

    // Stage 1: sample Phi over the deep half (deepest point included).
    {
        std::vector<double> s_of, c1_of, c2_of;
        for (int i = L / 2; i < L; ++i) {
            const classify_detail::SCoeffs c =
                classify_detail::s_coefficients(prob, frame, lambda, pts[i]);
            s_of.push_back(std::log(frame.depth(pts[i])));
            c1_of.push_back(c.c1);
            c2_of.push_back(c.c2);
        }
        bool convex = s_of.size() >= 3;
        for (std::size_t i = 0; convex && i < s_of.size(); ++i) {
            // d c1 / d s by one-sided / central differences on the sampled levels.
            double dc1;
            if (i == 0)
                dc1 = (c1_of[1] - c1_of[0]) / (s_of[1] - s_of[0]);
            else if (i + 1 == s_of.size())
                dc1 = (c1_of[i] - c1_of[i - 1]) / (s_of[i] - s_of[i - 1]);
            else
                dc1 = (c1_of[i + 1] - c1_of[i - 1]) / (s_of[i + 1] - s_of[i - 1]);
            const double one_m = 1.0 - c1_of[i];
            const double phi = 0.25 * (one_m * one_m + 4.0 * c2_of[i]) - 0.5 * dc1;
            const double scale = 1.0 + one_m * one_m + std::abs(c2_of[i]) + std::abs(dc1);
            if (!(phi >= -1e-10 * scale)) convex = false;
        }
        if (convex) return Tri::Yes;
    }

    // Stage 2: Pruefer zero count, level by level toward the endpoint.
    OdeRhs angle = [&prob, &frame, lambda](double s, const std::vector<double>& y,
                                           std::vector<double>& dy) {
        const double d = std::exp(s);
        const double x = frame.base + frame.orient * d;
        const double p = prob.p_at(x);
        const double b = 1.0 - frame.orient * d * prob.p.derivative(x) / p;
        const double a = d * d * (prob.q(x) - lambda * prob.r_at(x)) / p;
        const double c = std::cos(y[0]);
        const double sn = std::sin(y[0]);
        dy[0] = c * c - b * sn * c - a * sn * sn;
    };
    OdeOptions opt;
    opt.rtol = 1e-9;
    opt.atol = 1e-12;
    opt.max_steps = 300000;

    double psi = M_PI / 2.0; // start from a generic (nonzero) solution direction
    double s_cur = std::log(frame.depth(pts[0]));
    long deep_zeros = 0;
    for (int i = 1; i < L; ++i) {
        const double s_next = std::log(frame.depth(pts[i]));
        long crossings = 0;
        try {
            OdeResult r = integrate_ode(angle, s_cur, s_next, {psi}, opt);
            // The angle passes multiples of pi transversally (psi' = 1 there),
            // upward when s increases toward the endpoint (infinite endpoint),
            // downward when it decreases (finite endpoint); either way the
            // zero count is the floor difference taken along the traversal.
            const long dfloor = static_cast<long>(std::floor(r.y[0] / M_PI)) -
                                static_cast<long>(std::floor(psi / M_PI));
            crossings = (s_next > s_cur) ? dfloor : -dfloor;
            psi = r.y[0];
        } catch (const std::exception&) {
            // Step budget exhausted mid-grid: zeros already seen in the deep
            // half are decisive, otherwise the question stays open.
            return deep_zeros > 0 ? Tri::No : Tri::Unknown;
        }
        s_cur = s_next;
        if (i >= L / 2) {
            deep_zeros += crossings;
            if (deep_zeros > 8) return Tri::No; // clearly oscillatory; stop early
        }
    }
    return deep_zeros > 0 ? Tri::No : Tri::Yes;
}

// --- principal-solution ratio at two spectral points -------------------------

/// Endpoint limit of the ratio of principal solutions taken at two spectral
/// points.  A finite nonzero limit is the ratio form of the trace-class
/// property; a vanishing or diverging ratio refutes it.
struct RatioProbe {
    bool available = false;
    LimitEstimate est;
    std::string path; ///< "respectral" (independent rebuilds) or "series"
    double z1 = 0.0, z2 = 0.0;
};

/**
 * Probe lim u_{z1}(x) / u_{z2}(x) toward the endpoint.
 *
 * Preferred path: rebuild the principal solution numerically at the two
 * comparison points z = anchor - z_step and anchor - 2 z_step (below the
 * anchor, where the expression stays disconjugate).  When the local growth
 * exponents are too close to separate numerically -- the logarithmic
 * borderline cases -- fall back to the power-series transfer evaluated at
 * two points inside its validity disk.
 */
inline RatioProbe principal_ratio_probe(const SLProblem& prob, Side side, double anchor,
                                        const ClassifyConfig& cfg, EndpointSeries& series) {
    RatioProbe probe;
    const EndpointGrid& grid = series.grid();
    const int L = grid.levels();
    const double z1 = cfg.lambda_anchor - cfg.z_step;
    const double z2 = cfg.lambda_anchor - 2.0 * cfg.z_step;

    // Numeric rebuild at the two comparison points.  Skip when the growth
    // exponents fail to separate at the deepest level; the outward pass would
    // only discover the same thing slowly.  (The opposite extreme -- an
    // essentially singular endpoint with astronomical separation -- is safe:
    // the construction hands its deep region to the Liouville-Green fill
    // before any explicit integration starts, or refuses it outright.)
    const double sep = std::min(classify_detail::deep_separation(prob, grid, z1),
                                classify_detail::deep_separation(prob, grid, z2));
    if (sep >= 0.05) {
        try {
            const BaseSolutions b1 =
                base_solutions(prob, side, anchor, grid.config(), z1, nullptr);
            const BaseSolutions b2 =
                base_solutions(prob, side, anchor, grid.config(), z2, nullptr);
            std::vector<LogValue> seq;
            for (int lev = 1; lev < L; ++lev) {
                const int node = grid.node_of_point(lev);
                if (b2.u[node].is_zero()) {
                    seq.push_back(LogValue());
                    continue;
                }
                seq.push_back(b1.u[node] / b2.u[node]);
            }
            probe.est = classify_limit(seq, grid.sigma());
            probe.available = true;
            probe.path = "respectral";
            probe.z1 = z1;
            probe.z2 = z2;
            return probe;
        } catch (const std::exception&) {
            // fall through to the series path
        }
    }

    // Series path: evaluate the spectral-parameter power series at two points
    // small enough that every grid level lies inside the validity disk.  The
    // ladder bound accumulates from the endpoint, so the disk is tightest at
    // the anchor-side nodes: take the minimum over the whole grid.
    double guard = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.node_count(); ++i) guard = std::min(guard, series.radius_guard(i));
    if (!(guard > 1e-8)) return probe; // series unusable at depth
    const double dz = std::min(cfg.z_step, 0.45 * guard);
    const double w1 = cfg.lambda_anchor - dz;
    const double w2 = cfg.lambda_anchor - 2.0 * dz;
    try {
        std::vector<LogValue> seq;
        for (int lev = 1; lev < L; ++lev) {
            const int node = grid.node_of_point(lev);
            const LogValue y1 = classify_detail::real_part_log(series.eval_phi(w1, node).y);
            const LogValue y2 = classify_detail::real_part_log(series.eval_phi(w2, node).y);
            seq.push_back(y2.is_zero() ? LogValue() : y1 / y2);
        }
        probe.est = classify_limit(seq, grid.sigma());
        probe.available = true;
        probe.path = "series";
        probe.z1 = w1;
        probe.z2 = w2;
    } catch (const std::exception&) {
        probe.available = false;
    }
    return probe;
}

// --- trace-class property ----------------------------------------------------

struct HypothesisResult {
    TraceClass verdict = TraceClass::Inconclusive;
    QuadratureOutcome pairing; ///< primary: integral of |u v| r at the endpoint
    RatioProbe ratio;          ///< secondary: principal ratio at two spectral points
    std::vector<EvidenceItem> evidence;
};

/**
 * Decide the trace-class property at the endpoint.  Primary criterion: the
 * integral of |u v| r converges.  Secondary: the principal-solution ratio at
 * two spectral points has a finite nonzero limit.  Holds only when both
 * pass; Fails when either is decisively negative; otherwise Inconclusive.
 */
inline HypothesisResult hypothesis_check(const SLProblem& prob, Side side, double anchor,
                                         const ClassifyConfig& cfg, EndpointSeries& series) {
    HypothesisResult res;
    res.pairing = series.hypothesis_verdict();
    res.ratio = principal_ratio_probe(prob, side, anchor, cfg, series);

    res.evidence.push_back({"pairing-weight-integral", -1,
                            integral_class_name(res.pairing.cls), res.pairing.rate});
    if (res.ratio.available)
        res.evidence.push_back({"principal-ratio(" + res.ratio.path + ")", -1,
                                limit_class_name(res.ratio.est.cls), res.ratio.est.rate});
    else
        res.evidence.push_back({"principal-ratio", -1, "unavailable", 0.0});

    const bool primary_pass = res.pairing.cls == IntegralClass::Convergent;
    const bool primary_fail = res.pairing.divergent();
    const bool secondary_pass =
        res.ratio.available && res.ratio.est.cls == LimitClass::Finite;
    const bool secondary_fail =
        res.ratio.available && (res.ratio.est.cls == LimitClass::Zero ||
                                res.ratio.est.cls == LimitClass::Infinite);

    if (primary_fail || secondary_fail)
        res.verdict = TraceClass::Fails;
    else if (primary_pass && secondary_pass)
        res.verdict = TraceClass::Holds;
    else
        res.verdict = TraceClass::Inconclusive;
    return res;
}

// --- limit circle / limit point ----------------------------------------------

struct LcLpResult {
    LcLp verdict = LcLp::Unknown;
    QuadratureOutcome v2r; ///< integral of v^2 r (decides)
    QuadratureOutcome u2r; ///< integral of u^2 r (consistency, when v^2 r converges)
    bool fault = false;    ///< v^2 r convergent but u^2 r divergent: impossible since u << v
};

/// Limit circle iff the nonprincipal solution is square-integrable against r
/// near the endpoint.  When it is, the principal one must be as well; a
/// divergent u^2 r with convergent v^2 r is flagged as a numerical fault.
inline LcLpResult lc_lp_classify(const EndpointSeries& series) {
    LcLpResult res;
    const EndpointGrid& grid = series.grid();
    const BaseSolutions& base = series.base();
    const int N = grid.node_count();

    std::vector<LogValue> g(N);
    for (int i = 0; i < N; ++i)
        g[i] = base.v[i] * base.v[i] * LogValue::from_double(series.weight(i));
    res.v2r = improper_integral_sampled(grid, g);

    if (res.v2r.cls == IntegralClass::Convergent) {
        for (int i = 0; i < N; ++i)
            g[i] = base.u[i] * base.u[i] * LogValue::from_double(series.weight(i));
        res.u2r = improper_integral_sampled(grid, g);
        if (res.u2r.divergent()) {
            res.fault = true;
            res.verdict = LcLp::Unknown;
        } else {
            res.verdict = LcLp::LimitCircle;
        }
    } else if (res.v2r.divergent()) {
        res.verdict = LcLp::LimitPoint;
    } else {
        res.verdict = LcLp::Unknown;
    }
    return res;
}

// --- regularization index ----------------------------------------------------

struct IndexResult {
    IndexVerdict index;
    std::vector<EvidenceItem> evidence;
    int l_pairing = -1; ///< first n with a convergent theta_0 theta_n r pairing
    int l_ratio = -2;   ///< (first n with nonzero phi_0 / theta_n limit) - 1
    std::vector<std::string> faults;
};

/**
 * Find the regularization index: the smallest n for which theta_0 theta_n r
 * is integrable at the endpoint.
 *
 * The pairing scan drives the ladder: theta entries are built with the
 * shifted recursion until the first convergent pairing at n = index, after
 * which one further entry is appended with the natural recursion.  The
 * ratio criterion then confirms independently: phi_0 / theta_n vanishes for
 * every n <= index, and its first nonzero limit sits exactly at index + 1.
 * The two criteria must agree on that position; a rung whose limit cannot be
 * classified at grid depth is reported as evidence but casts no vote.  A
 * scan that exhausts n_max without a convergent pairing (and with every
 * ratio limit decisively vanishing) reports InfiniteAtDepth.
 */
inline IndexResult regularization_index(EndpointSeries& series, int n_max) {
    IndexResult res;
    const double sigma = series.grid().sigma();

    // Pairing scan (drives the ladder construction).
    bool pairing_inconclusive = false;
    for (int n = 0; n <= n_max; ++n) {
        if (n >= series.theta_count()) series.extend_theta_pre_index();
        const QuadratureOutcome po = series.pairing_verdict(n);
        res.evidence.push_back(
            {"ladder-pairing-integral", n, integral_class_name(po.cls), po.rate});
        if (po.cls == IntegralClass::Convergent) {
            res.l_pairing = n;
            break;
        }
        if (po.cls == IntegralClass::Inconclusive) {
            pairing_inconclusive = true;
            break;
        }
    }

    if (res.l_pairing >= 0) {
        // One natural entry past the index for the ratio criterion.
        series.truncate_theta(res.l_pairing + 1);
        series.extend_theta_natural();
    }

    // Ratio scan over every built ladder position.  The criterion's output is
    // the position of the first decisively nonzero limit; a rung that stays
    // inconclusive short of that position is recorded but carries no vote.
    // (At a resonant rung the ladder entry is C + beta log d with C >> beta:
    // the ratio's true limit is zero, but the crossover depth exp(-C/beta)
    // lies beyond any grid, so the rung legitimately fails to classify.)
    const int scan_to = res.l_pairing >= 0 ? res.l_pairing + 1
                                           : std::min(n_max, series.theta_count() - 1);
    int first_nonzero = -1;
    bool ratio_oscillatory = false;
    bool ratio_gap = false; // some rung below the first nonzero failed to classify
    for (int n = 0; n <= scan_to; ++n) {
        const LimitEstimate est = classify_limit(series.ratio_levels(n), sigma);
        res.evidence.push_back({"ladder-ratio-limit", n, limit_class_name(est.cls), est.rate});
        if (est.cls == LimitClass::Finite || est.cls == LimitClass::Infinite) {
            if (first_nonzero < 0) first_nonzero = n;
        } else if (est.cls == LimitClass::Oscillatory) {
            ratio_oscillatory = true;
            res.faults.push_back("oscillatory principal-to-ladder ratio at position " +
                                 std::to_string(n));
        } else if (est.cls == LimitClass::Inconclusive) {
            ratio_gap = true;
        }
    }
    res.l_ratio = first_nonzero - 1; // -2 when no nonzero limit was seen

    if (pairing_inconclusive) {
        res.index.kind = IndexKind::Unknown;
        return res;
    }

    if (res.l_pairing < 0) {
        // No convergent pairing up to n_max; corroborated only when every
        // scanned ratio limit decisively vanishes.
        if (first_nonzero < 0 && !ratio_oscillatory && !ratio_gap) {
            res.index.kind = IndexKind::InfiniteAtDepth;
            res.index.depth = n_max;
        } else if (first_nonzero >= 0) {
            res.index.kind = IndexKind::Unknown;
            res.faults.push_back(
                "criteria disagree: no convergent pairing up to depth " +
                std::to_string(n_max) + " but a nonzero ratio limit at position " +
                std::to_string(first_nonzero));
        } else {
            res.index.kind = IndexKind::Unknown;
        }
        return res;
    }

    if (res.l_ratio == res.l_pairing && !ratio_oscillatory) {
        res.index.kind = IndexKind::Finite;
        res.index.value = res.l_pairing;
    } else {
        res.index.kind = IndexKind::Unknown;
        if (!ratio_oscillatory)
            res.faults.push_back("criteria disagree: pairing index " +
                                 std::to_string(res.l_pairing) + " vs ratio index " +
                                 std::to_string(res.l_ratio));
    }
    return res;
}

// --- square-integrability profile --------------------------------------------

/// For each built ladder position, whether theta_n is square-integrable
/// against r near the endpoint.  The profile must be monotone: once a
/// position is square-integrable, so is every later one.
inline std::vector<L2Entry> l2_profile(const EndpointSeries& series,
                                       std::vector<std::string>* faults = nullptr) {
    std::vector<L2Entry> out;
    const EndpointGrid& grid = series.grid();
    const int N = grid.node_count();
    std::vector<LogValue> g(N);
    for (int n = 0; n < series.theta_count(); ++n) {
        const auto& th = series.theta(n);
        for (int i = 0; i < N; ++i)
            g[i] = th[i] * th[i] * LogValue::from_double(series.weight(i));
        const QuadratureOutcome q = improper_integral_sampled(grid, g);
        out.push_back({n, q.cls == IntegralClass::Convergent});
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i - 1].in_l2 && !out[i].in_l2 && faults)
            faults->push_back("square-integrability profile lost monotonicity at position " +
                              std::to_string(out[i].n));
    return out;
}

// --- perturbation stability --------------------------------------------------

struct PerturbationResult {
    bool condition_holds = false; ///< integral of |u v q0| converges
    QuadratureOutcome condition;
    IndexVerdict base_index;
    IndexVerdict perturbed_index;
    bool index_preserved = false;
};

/**
 * Test whether adding q0 to the potential preserves the regularization
 * index.  The sufficient condition is integrability of |u v q0| at the
 * endpoint; when it holds, the perturbed index is recomputed from scratch
 * (numeric base pair, no closed-form assistance) and compared.  A preserved
 * condition with a changed index is a falsification event for the caller to
 * surface, not a result to smooth over.
 */
inline PerturbationResult perturbation_stability(const SLProblem& prob, const Coefficient& q0,
                                                 Side side, double anchor,
                                                 const ClassifyConfig& cfg = {},
                                                 const SolutionHints* hints = nullptr) {
    PerturbationResult res;

    BaseSolutions base =
        base_solutions(prob, side, anchor, cfg.grid, cfg.lambda_anchor, hints);
    EndpointSeries series(prob, std::move(base), SeriesConfig{cfg.n_max, true});

    // Condition: integral of |u v q0| at the endpoint.
    {
        const EndpointGrid& grid = series.grid();
        const int N = grid.node_count();
        std::vector<LogValue> g(N);
        for (int i = 0; i < N; ++i) {
            const double q0x = q0(grid.nodes()[i]);
            g[i] = (series.base().u[i] * series.base().v[i]).abs() *
                   LogValue::from_double(std::abs(q0x));
        }
        res.condition = improper_integral_sampled(grid, g);
        res.condition_holds = res.condition.cls == IntegralClass::Convergent;
    }

    res.base_index = regularization_index(series, cfg.n_max).index;
    if (!res.condition_holds) return res;

    // Perturbed expression: same p and r, potential q + q0.
    SLProblem per;
    per.label = prob.label + " (perturbed)";
    per.interval = prob.interval;
    per.p = prob.p;
    per.r = prob.r;
    const Coefficient q_orig = prob.q;
    per.q = Coefficient::from_function(
        [q_orig, q0](double x) { return q_orig(x) + q0(x); },
        [q_orig, q0](double x) { return q_orig.derivative(x) + q0.derivative(x); });

    BaseSolutions per_base = base_solutions(per, side, anchor, cfg.grid, cfg.lambda_anchor);
    EndpointSeries per_series(per, std::move(per_base), SeriesConfig{cfg.n_max, true});
    if (per_series.hypothesis_verdict().cls != IntegralClass::Convergent) {
        res.perturbed_index.kind = IndexKind::Unknown;
        return res;
    }
    res.perturbed_index = regularization_index(per_series, cfg.n_max).index;

    res.index_preserved = res.base_index.kind == IndexKind::Finite &&
                          res.perturbed_index.kind == IndexKind::Finite &&
                          res.base_index.value == res.perturbed_index.value;
    return res;
}

// --- equivalence crosscheck at two spectral points ---------------------------

struct TfaeItem {
    std::string name;
    Tri pass = Tri::Unknown;
    std::string detail;
};

/// Four equivalent formulations of the trace-class property, each checked
/// numerically at a pair of spectral points; they must all pass or all fail.
struct TfaeReport {
    std::vector<TfaeItem> items;
    TraceClass overall = TraceClass::Inconclusive;
    std::string path; ///< "respectral" or "series"
};

namespace classify_detail {

inline Tri limit_item(const std::vector<LogValue>& seq, double sigma, std::string* detail) {
    const LimitEstimate est = classify_limit(seq, sigma);
    *detail = std::string(limit_class_name(est.cls)) + " (" + est.model + ")";
    if (est.cls == LimitClass::Finite) return Tri::Yes;
    if (est.cls == LimitClass::Zero || est.cls == LimitClass::Infinite) return Tri::No;
    return Tri::Unknown;
}

} // namespace classify_detail

/**
 * Crosscheck the trace-class property through its equivalent formulations at
 * two spectral points z1, z2:
 *   1. the ratio of principal solutions has a finite nonzero endpoint limit;
 *   2. the Wronskian of the z2-nonprincipal with the z1-principal solution
 *      has a finite nonzero endpoint limit;
 *   3. the ratio of nonprincipal solutions has a finite nonzero limit;
 *   4. the cross pairing |v_{z1} u_{z2}| r is integrable at the endpoint.
 *
 * Preferred path: independent numeric solution pairs at z1 and z2 (reusing
 * the anchored pair when z equals the series anchor).  Fallback for
 * logarithmically degenerate endpoints: series evaluation, which requires
 * both points to lie inside the validity disk at full depth.
 */
inline TfaeReport tfae_crosscheck(const SLProblem& prob, Side side, double anchor, double z1,
                                  double z2, const ClassifyConfig& cfg = {},
                                  const SolutionHints* hints = nullptr,
                                  EndpointSeries* series = nullptr) {
    TfaeReport rep;
    rep.items.resize(4);
    rep.items[0].name = "principal-ratio";
    rep.items[1].name = "cross-wronskian";
    rep.items[2].name = "nonprincipal-ratio";
    rep.items[3].name = "cross-pairing-integral";

    const EndpointGrid probe_grid(prob.interval, side, anchor, cfg.grid);
    const double sigma = probe_grid.sigma();

    // Assemble solution pairs at the two spectral points.
    auto build_at = [&](double z) -> BaseSolutions {
        if (hints && z == hints->lambda_anchor)
            return base_solutions(prob, side, anchor, cfg.grid, z, hints);
        if (classify_detail::deep_separation(prob, probe_grid, z) < 0.05)
            throw std::runtime_error("tfae_crosscheck: growth exponents do not separate");
        return base_solutions(prob, side, anchor, cfg.grid, z, nullptr);
    };

    std::optional<BaseSolutions> b1, b2;
    try {
        b1.emplace(build_at(z1));
        b2 = (z2 == z1) ? b1 : std::optional<BaseSolutions>(build_at(z2));
    } catch (const std::exception&) {
        b1.reset();
        b2.reset();
    }

    std::vector<LogValue> u1, du1, u2, v1, dv1, v2, dv2;
    std::vector<double> rw;
    const EndpointGrid* grid = nullptr;

    if (b1 && b2) {
        rep.path = "respectral";
        grid = &b1->grid;
        u1 = b1->u;
        du1 = b1->du;
        v1 = b1->v;
        dv1 = b1->dv;
        u2 = b2->u;
        v2 = b2->v;
        dv2 = b2->dv;
    } else {
        // Series fallback: both points must stay inside the validity disk at
        // the deepest node, otherwise the crosscheck has nothing to say.
        if (!series) {
            rep.overall = TraceClass::Inconclusive;
            for (auto& it : rep.items) it.detail = "no evaluation path";
            return rep;
        }
        rep.path = "series";
        grid = &series->grid();
        const int N = grid->node_count();
        double guard = std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i) guard = std::min(guard, series->radius_guard(i));
        const double need = std::max(std::abs(z1 - cfg.lambda_anchor),
                                     std::abs(z2 - cfg.lambda_anchor));
        if (!(need < guard)) {
            rep.overall = TraceClass::Inconclusive;
            for (auto& it : rep.items)
                it.detail = "spectral points outside the series validity disk";
            return rep;
        }
        u1.resize(N); du1.resize(N); v1.resize(N); dv1.resize(N);
        u2.resize(N); v2.resize(N); dv2.resize(N);
        for (int i = 0; i < N; ++i) {
            const auto p1 = series->eval_phi(z1, i);
            const auto p2 = series->eval_phi(z2, i);
            const auto t1 = series->eval_theta(z1, i);
            const auto t2 = series->eval_theta(z2, i);
            u1[i] = classify_detail::real_part_log(p1.y);
            du1[i] = classify_detail::real_part_log(p1.dy);
            u2[i] = classify_detail::real_part_log(p2.y);
            v1[i] = classify_detail::real_part_log(t1.y);
            dv1[i] = classify_detail::real_part_log(t1.dy);
            v2[i] = classify_detail::real_part_log(t2.y);
            dv2[i] = classify_detail::real_part_log(t2.dy);
        }
    }

    const int N = grid->node_count();
    rw.resize(N);
    for (int i = 0; i < N; ++i) rw[i] = prob.r_at(grid->nodes()[i]);

    // Items 1-3: endpoint limits sampled at the grid levels.
    std::vector<LogValue> s_ratio_u, s_wronsk, s_ratio_v;
    for (int lev = 1; lev < grid->levels(); ++lev) {
        const int node = grid->node_of_point(lev);
        s_ratio_u.push_back(u2[node].is_zero() ? LogValue() : u1[node] / u2[node]);
        s_wronsk.push_back(v2[node] * du1[node] - dv2[node] * u1[node]);
        s_ratio_v.push_back(v2[node].is_zero() ? LogValue() : v1[node] / v2[node]);
    }
    rep.items[0].pass = classify_detail::limit_item(s_ratio_u, sigma, &rep.items[0].detail);
    rep.items[1].pass = classify_detail::limit_item(s_wronsk, sigma, &rep.items[1].detail);
    rep.items[2].pass = classify_detail::limit_item(s_ratio_v, sigma, &rep.items[2].detail);

    // Item 4: integrability of the cross pairing.
    {
        std::vector<LogValue> g(N);
        for (int i = 0; i < N; ++i)
            g[i] = (v1[i] * u2[i]).abs() * LogValue::from_double(rw[i]);
        const QuadratureOutcome q = improper_integral_sampled(*grid, g);
        rep.items[3].detail = integral_class_name(q.cls);
        rep.items[3].pass = q.cls == IntegralClass::Convergent ? Tri::Yes
                            : q.divergent()                    ? Tri::No
                                                               : Tri::Unknown;
    }

    int yes = 0, no = 0;
    for (const auto& it : rep.items) {
        if (it.pass == Tri::Yes) ++yes;
        if (it.pass == Tri::No) ++no;
    }
    if (yes == 4)
        rep.overall = TraceClass::Holds;
    else if (no == 4)
        rep.overall = TraceClass::Fails;
    else
        rep.overall = TraceClass::Inconclusive;
    return rep;
}

// --- endpoint report driver --------------------------------------------------

/**
 * Full classification of one endpoint: nonoscillation, limit circle vs.
 * limit point, the trace-class property, the regularization index, and the
 * square-integrability profile of the ladder, with per-criterion evidence
 * and internal consistency checks.
 */
inline EndpointReport endpoint_report(const SLProblem& prob, Side side, double anchor,
                                      const ClassifyConfig& cfg = {},
                                      const SolutionHints* hints = nullptr) {
    EndpointReport rep;
    rep.side = side;

    rep.nonoscillatory = nonoscillation_check(prob, side, anchor, cfg.lambda_anchor, cfg.grid);
    if (rep.nonoscillatory == Tri::No) {
        // Oscillatory endpoints are outside the scope of the pairing-based
        // classification; everything downstream stays undecided.
        rep.evidence.push_back({"nonoscillation", -1, "oscillatory", 0.0});
        return rep;
    }

    std::optional<BaseSolutions> base;
    try {
        base.emplace(base_solutions(prob, side, anchor, cfg.grid, cfg.lambda_anchor, hints));
    } catch (const std::exception& e) {
        rep.faults.push_back(std::string("base solutions unavailable: ") + e.what());
        return rep;
    }
    EndpointSeries series(prob, std::move(*base), SeriesConfig{cfg.n_max, true});

    const LcLpResult lc = lc_lp_classify(series);
    rep.lc_lp = lc.verdict;
    rep.evidence.push_back(
        {"nonprincipal-square-integral", -1, integral_class_name(lc.v2r.cls), lc.v2r.rate});
    if (lc.v2r.cls == IntegralClass::Convergent)
        rep.evidence.push_back(
            {"principal-square-integral", -1, integral_class_name(lc.u2r.cls), lc.u2r.rate});
    if (lc.fault)
        rep.faults.push_back(
            "nonprincipal solution square-integrable but principal one is not");

    const HypothesisResult hyp = hypothesis_check(prob, side, anchor, cfg, series);
    rep.trace_class = hyp.verdict;
    for (const auto& e : hyp.evidence) rep.evidence.push_back(e);

    if (rep.trace_class == TraceClass::Holds) {
        IndexResult ir = regularization_index(series, cfg.n_max);
        rep.index = ir.index;
        for (const auto& e : ir.evidence) rep.evidence.push_back(e);
        for (const auto& f : ir.faults) rep.faults.push_back(f);
    } else if (rep.trace_class == TraceClass::Fails) {
        rep.index.kind = IndexKind::Undefined;
    } else {
        rep.index.kind = IndexKind::Unknown;
    }

    rep.l2_profile = l2_profile(series, &rep.faults);

    // Cross-invariant: limit circle exactly at index zero (when the
    // trace-class property holds and both verdicts are decisive).
    if (rep.trace_class == TraceClass::Holds && rep.lc_lp != LcLp::Unknown &&
        rep.index.kind != IndexKind::Unknown) {
        const bool lc_side = rep.lc_lp == LcLp::LimitCircle;
        const bool zero_index = rep.index.kind == IndexKind::Finite && rep.index.value == 0;
        if (lc_side != zero_index)
            rep.faults.push_back("limit-circle verdict and zero-index verdict disagree");
    }
    return rep;
}

/// Convenience: classify one endpoint of a catalog entry, using its
/// recommended anchor and any attached closed-form solution pair.  The
/// closed forms are anchored at one spectral point; re-anchoring the
/// classification elsewhere falls back to the numeric construction.
inline EndpointReport endpoint_report(const catalog::CatalogEntry& entry, Side side,
                                      const ClassifyConfig& cfg = {}) {
    const double anchor = side == Side::Left ? entry.anchor_left : entry.anchor_right;
    const auto& hints = side == Side::Left ? entry.hints_left : entry.hints_right;
    const SolutionHints* h =
        (hints && hints->lambda_anchor == cfg.lambda_anchor) ? &*hints : nullptr;
    return endpoint_report(entry.problem, side, anchor, cfg, h);
}

} // namespace slreg
