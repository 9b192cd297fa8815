#pragma once

/**
 * @file solutions.hpp
 * @brief Principal / nonprincipal base solution pairs near a singular endpoint.
 *
 * Everything downstream (series recursions, index classification, transforms)
 * is built on a pair (u, v) of real solutions of tau y = lambda0 y near one
 * endpoint, where u is principal (u/v -> 0 at the endpoint) and v is the
 * nonprincipal companion normalized by the Wronskian convention
 *
 *     W(v, u) = v u^[1] - v^[1] u = +1 at a left endpoint, -1 at a right one,
 *
 * with y^[1] = p y' the quasi-derivative.
 *
 * Obtaining u stably is the delicate part: shooting from the interior toward
 * the endpoint is hopeless (the nonprincipal component dominates), so the
 * integration runs OUTWARD, from far deeper than the working grid toward the
 * anchor, in direction/log-amplitude variables
 *
 *     y = e^m cos(chi),  y^[1] = e^m sin(chi),
 *     chi' = (q - lambda0 r) cos^2(chi) - sin^2(chi)/p,
 *     m'   = sin(chi) cos(chi) (1/p + q - lambda0 r),
 *
 * which never overflow.  An arbitrary seed direction at depth x_d carries a
 * nonprincipal admixture that shrinks geometrically on the way out, so two
 * independent seeds must agree at the working depth; the extension depth
 * adapts until they do.
 *
 * Where the separation is exponential the explicit integration becomes
 * stability-limited (steps shrink like 1/sqrt(Q)), but exactly there the
 * Liouville-Green approximation
 *
 *     u ~ [p (q - lambda0 r)]^{-1/4} exp(-|integral of sqrt(Q)|),  Q = (q - lambda0 r)/p,
 *
 * is accurate (its error control quantity |Q'| / Q^{3/2} is small).  Deep
 * stiff levels therefore use the Liouville-Green form directly and seed the
 * explicit integration at the stiffness boundary; the seeding error excites a
 * nonprincipal coefficient suppressed by the exponential separation itself.
 *
 * v then follows from reduction of order,
 *
 *     v(x) = u(x) I(x),   I(x) = integral of 1/(p u^2) between x and the anchor,
 *     v^[1] = u^[1] I - W(v,u)/u,
 *
 * which enforces the Wronskian normalization exactly and never subtracts
 * nearly equal solutions.  Principality of u is verified a posteriori by the
 * divergence of I toward the endpoint.  Catalog problems may supply closed
 * forms for u alone (v is then built by reduction of order) or for both.
 */

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slreg/grid.hpp"
#include "slreg/log_value.hpp"
#include "slreg/ode.hpp"
#include "slreg/problem.hpp"
#include "slreg/quadrature.hpp"

namespace slreg {

/// A solution sample: value and quasi-derivative y^[1] = p y'.
struct SolutionSample {
    LogValue y, dy;
};

/// Closed-form solution data supplied by a catalog entry.  `nonprincipal` may
/// be left empty; the companion is then built by reduction of order.
struct SolutionHints {
    std::function<SolutionSample(double)> principal;
    std::function<SolutionSample(double)> nonprincipal;
    double lambda_anchor = 0.0;
};

/// First-order system for tau y = lambda y: state (y, y^[1]).
inline OdeRhs sl_system(const SLProblem& prob, double lambda) {
    return [&prob, lambda](double x, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[1] / prob.p_at(x);
        dy[1] = (prob.q(x) - lambda * prob.r_at(x)) * y[0];
    };
}

struct BaseSolutions {
    Side side = Side::Left;
    EndpointGrid grid;
    double lambda_anchor = 0.0;
    std::vector<LogValue> u{}, du{}; ///< principal solution and quasi-derivative at grid nodes
    std::vector<LogValue> v{}, dv{}; ///< nonprincipal companion
    bool from_hints = false;
    double contamination = 0.0; ///< measured two-seed disagreement at the deepest node
    int extension_levels = 0;   ///< extra depth used by the outward pass
    int stiff_levels = 0;       ///< base levels handled by the Liouville-Green form

    /// Wronskian W(v,u) at a node; should equal wronskian_target() everywhere.
    LogValue wronskian(int node) const { return v[node] * du[node] - dv[node] * u[node]; }
    /// +1 at a left endpoint, -1 at a right endpoint.
    int wronskian_target() const { return side == Side::Left ? 1 : -1; }
};

namespace solution_detail {

/// Q = (q - lambda r)/p and the stiffness / Liouville-Green error measures.
struct LocalShape {
    double Q = 0;         ///< (q - lambda r) / p
    double stiffness = 0; ///< depth * sqrt(Q): explicit steps needed per level
    double lg_error = 1;  ///< |Q'| / (2 Q^{3/2}): Liouville-Green control quantity
};

inline LocalShape local_shape(const SLProblem& prob, double lambda, double x, double depth) {
    LocalShape s;
    const double p = prob.p_at(x), r = prob.r_at(x), q = prob.q(x);
    s.Q = (q - lambda * r) / p;
    if (s.Q <= 0) return s;
    s.stiffness = depth * std::sqrt(s.Q);
    const double dq = prob.q.derivative(x), dr = prob.r.derivative(x), dp = prob.p.derivative(x);
    const double dQ = (dq - lambda * dr) / p - s.Q * dp / p;
    s.lg_error = std::abs(dQ) / (2.0 * std::pow(s.Q, 1.5));
    return s;
}

/// log of the Liouville-Green principal amplitude prefactor [p(q-lambda r)]^{-1/4}.
inline double lg_prefactor_log(const SLProblem& prob, double lambda, double x) {
    const double p = prob.p_at(x);
    const double w = p * (prob.q(x) - lambda * prob.r_at(x));
    if (!(w > 0)) throw std::runtime_error("base_solutions: Liouville-Green region lost positivity");
    return -0.25 * std::log(w);
}

/// d/dx of log u in the Liouville-Green form (toward-endpoint decay).
inline double lg_dlogu(const SLProblem& prob, double lambda, double x, double toward_endpoint) {
    const double p = prob.p_at(x), r = prob.r_at(x), q = prob.q(x);
    const double Q = (q - lambda * r) / p;
    const double dq = prob.q.derivative(x), dr = prob.r.derivative(x), dp = prob.p.derivative(x);
    const double w = p * (q - lambda * r);
    const double dw = dp * (q - lambda * r) + p * (dq - lambda * dr);
    // -(1/4) d log(pQp) - (sign toward endpoint) sqrt(Q)
    return -0.25 * dw / w - toward_endpoint * std::sqrt(Q);
}

} // namespace solution_detail

/**
 * Construct the base solution pair at one endpoint.  When `hints` are given
 * their principal form is sampled directly (their lambda_anchor must match);
 * otherwise the adaptive outward-integration scheme runs.  The nonprincipal
 * companion comes from the hints when present, else from reduction of order.
 */
inline BaseSolutions base_solutions(const SLProblem& prob, Side side, double anchor,
                                    const GridConfig& cfg, double lambda_anchor = 0.0,
                                    const SolutionHints* hints = nullptr) {
    BaseSolutions bs{side, EndpointGrid(prob.interval, side, anchor, cfg)};
    bs.lambda_anchor = lambda_anchor;
    const int N = bs.grid.node_count();
    bs.u.resize(N);
    bs.du.resize(N);
    bs.v.resize(N);
    bs.dv.resize(N);

    if (hints) {
        if (hints->lambda_anchor != lambda_anchor)
            throw std::invalid_argument("base_solutions: hints carry a different series anchor");
        for (int i = 0; i < N; ++i) {
            const SolutionSample s = hints->principal(bs.grid.nodes()[i]);
            bs.u[i] = s.y;
            bs.du[i] = s.dy;
        }
        bs.from_hints = true;
        if (hints->nonprincipal) {
            for (int i = 0; i < N; ++i) {
                const SolutionSample s = hints->nonprincipal(bs.grid.nodes()[i]);
                bs.v[i] = s.y;
                bs.dv[i] = s.dy;
            }
            return bs;
        }
    } else {
        // ---- numeric outward construction of u ----
        const std::vector<double>& nodes = bs.grid.nodes();

        // Identify the stiff-deep region of the BASE grid (handled by the
        // Liouville-Green form).  Levels are scanned shallow -> deep; once the
        // stiffness crosses the explicit budget it stays crossed for the
        // catalog-relevant potentials.
        const double kStiffBudget = 2000.0;
        int first_stiff_level = bs.grid.levels();
        for (int lev = 1; lev < bs.grid.levels(); ++lev) {
            const double x = bs.grid.points()[lev];
            const auto sh = solution_detail::local_shape(prob, lambda_anchor, x,
                                                         bs.grid.depth_coordinate(x));
            if (sh.Q > 0 && sh.stiffness > kStiffBudget) {
                if (sh.lg_error > 0.05)
                    throw std::runtime_error(
                        "base_solutions: endpoint is both stiff and outside the "
                        "Liouville-Green regime; supply closed-form hints");
                first_stiff_level = lev;
                break;
            }
        }
        const bool has_stiff = first_stiff_level < bs.grid.levels();
        if (has_stiff && first_stiff_level < 2)
            throw std::runtime_error(
                "base_solutions: stiff region reaches the anchor; move the anchor closer to "
                "the endpoint or supply hints");
        bs.stiff_levels = has_stiff ? bs.grid.levels() - first_stiff_level : 0;

        const double toward_endpoint = (bs.grid.deepest() > anchor) ? 1.0 : -1.0;
        const int last_explicit_node =
            has_stiff ? bs.grid.node_of_point(first_stiff_level) : N - 1;
        const double x_exp_deep = nodes[last_explicit_node];

        // Liouville-Green log-amplitudes for the stiff nodes, relative to the
        // boundary node: log u(x) - log u(x_b) = pref(x) - pref(x_b) - |I(x)|.
        std::vector<double> lg_rel(N, 0.0); // only indices > last_explicit_node used
        if (has_stiff) {
            const double pref_b =
                solution_detail::lg_prefactor_log(prob, lambda_anchor, x_exp_deep);
            const std::function<LogValue(double)> root_q = [&](double t) {
                const auto sh = solution_detail::local_shape(prob, lambda_anchor, t, 1.0);
                if (!(sh.Q > 0))
                    throw std::runtime_error(
                        "base_solutions: Liouville-Green region lost positivity");
                return LogValue::from_double(std::sqrt(sh.Q));
            };
            double I = 0.0;
            double xprev = x_exp_deep;
            for (int i = last_explicit_node + 1; i < N; ++i) {
                const double xi = nodes[i];
                // The gap integrals of sqrt(Q) span many orders of magnitude
                // near a strongly singular endpoint; adaptive Gauss-Kronrod
                // keeps the accumulated log error near the rounding floor.
                const auto gk = quad_detail::gk15(root_q, std::min(xprev, xi),
                                                 std::max(xprev, xi), 1e-14, 0);
                I += gk.value.to_double(); // unsigned range integral of sqrt(Q)
                lg_rel[i] = solution_detail::lg_prefactor_log(prob, lambda_anchor, xi) - pref_b - I;
                xprev = xi;
            }
        }

        // Explicit outward integration in the grid coordinate s = log(depth).
        // The state is (L, m) with L = (dx/ds) y'/y and m = log y.  L obeys the
        // Riccati flow
        //     dL/ds = L - L^2 - c1 L + c2,
        //     c1 = (dx/ds) p'/p,      c2 = depth^2 (q - lambda r) / p,
        // whose coefficients are O(1) at a power-type endpoint; its equilibria
        // are the two characteristic growth exponents, of which the principal
        // one attracts in the outward direction.  Generic seeds therefore relax
        // onto the principal solution, and the nonprincipal admixture keeps
        // shrinking as the pass proceeds toward the anchor.  (A direct angle
        // variable atan(y^[1]/y) is unusable here: near a power singularity it
        // collapses to within a few ulps of pi/2.)
        const bool inf_ep = bs.grid.endpoint_infinite();
        const double depth_base = inf_ep ? 0.0 : bs.grid.endpoint();
        const double orient = inf_ep ? (side == Side::Right ? 1.0 : -1.0)
                                     : (anchor > bs.grid.endpoint() ? 1.0 : -1.0);
        auto depth_of = [&](double x) { return std::abs(x - depth_base); };

        OdeRhs flow = [&prob, lambda_anchor, depth_base,
                       orient](double s, const std::vector<double>& y, std::vector<double>& dy) {
            const double d = std::exp(s);
            const double x = depth_base + orient * d;
            const double p = prob.p_at(x);
            const double c1 = orient * d * prob.p.derivative(x) / p;
            const double c2 = d * d * (prob.q(x) - lambda_anchor * prob.r_at(x)) / p;
            const double L = y[0];
            dy[0] = L - L * L - c1 * L + c2;
            dy[1] = L;
        };

        OdeOptions opt;
        opt.rtol = 1e-12;
        opt.atol = 1e-12;
        auto run_pass = [&](double s_seed, double L_seed, int first_node) {
            std::vector<double> stops;
            for (int i = first_node; i >= 0; --i)
                stops.push_back(std::log(depth_of(nodes[i])));
            return integrate_through(flow, s_seed, stops, {L_seed, 0.0}, opt);
        };

        auto fill_from_trace = [&](const OdeTrace& tr, int first_node, std::vector<LogValue>& uu,
                                   std::vector<LogValue>& duu) {
            uu.assign(N, LogValue());
            duu.assign(N, LogValue());
            for (std::size_t k = 0; k < tr.states.size(); ++k) {
                const int node = first_node - static_cast<int>(k);
                const double L = tr.states[k][0], m = tr.states[k][1];
                const double x = nodes[node];
                uu[node] = LogValue::from_log(1, m);
                // y^[1] = p y' = p (L / (orient * depth)) y
                if (L != 0.0)
                    duu[node] = LogValue::from_log(
                        (L > 0 ? 1 : -1) * (orient > 0 ? 1 : -1),
                        m + std::log(prob.p_at(x)) + std::log(std::abs(L)) -
                            std::log(depth_of(x)));
            }
        };

        // An upper bound on |equilibrium growth rate| from the seed-local
        // coefficients; seeds beyond the principal root relax monotonically
        // onto it and can never hit a Riccati pole (a zero of y).
        auto seed_rates = [&](double x_seed) {
            const double d = depth_of(x_seed);
            const double p = prob.p_at(x_seed);
            const double c1 = orient * d * prob.p.derivative(x_seed) / p;
            const double c2 = d * d * (prob.q(x_seed) - lambda_anchor * prob.r_at(x_seed)) / p;
            const double disc = (1 - c1) * (1 - c1) + 4 * c2;
            return 0.5 * (std::abs(1 - c1) + std::sqrt(std::max(disc, 0.0))) + 2.0;
        };
        // At a finite endpoint the principal solution is the one with the
        // LARGEST depth exponent (it vanishes fastest); toward an infinite
        // endpoint it is the one with the most negative rate.
        const double principal_side = inf_ep ? -1.0 : 1.0;

        // The attracting equilibrium of the outward Riccati flow for the
        // coefficients frozen at x_seed.  Where the coefficients have settled
        // to their endpoint values this IS the principal log-derivative, up to
        // the adiabatic drift of the equilibrium divided by sqrt(disc).
        auto frozen_root = [&](double x_seed, double* disc_out) {
            const double d = depth_of(x_seed);
            const double p = prob.p_at(x_seed);
            const double c1 = orient * d * prob.p.derivative(x_seed) / p;
            const double c2 = d * d * (prob.q(x_seed) - lambda_anchor * prob.r_at(x_seed)) / p;
            const double disc = (1 - c1) * (1 - c1) + 4 * c2;
            if (disc_out) *disc_out = disc;
            return 0.5 * ((1 - c1) + principal_side * std::sqrt(std::max(disc, 0.0)));
        };

        std::vector<LogValue> u_expl, du_expl;
        if (has_stiff) {
            // Seed from the Liouville-Green direction at the boundary node; the
            // seeding error is suppressed by the exponential separation.
            const double dlogu =
                solution_detail::lg_dlogu(prob, lambda_anchor, x_exp_deep, toward_endpoint);
            const double L_seed = orient * depth_of(x_exp_deep) * dlogu;
            OdeTrace tr = run_pass(std::log(depth_of(x_exp_deep)), L_seed, last_explicit_node);
            fill_from_trace(tr, last_explicit_node, u_expl, du_expl);
            bs.contamination = 0.0;
        } else {
            // Two well-separated generic seeds from an adaptively extended depth.
            const int kMaxExtension = 160;
            int K = 8;
            double agree_best = std::numeric_limits<double>::infinity();
            std::vector<LogValue> u_b, du_b;
            int K_floor = -1;   // set when the preflight cannot reach depth K
            double x_floor = 0; // deepest evaluable seed point in that case
            while (true) {
                // Preflight: shrink K until the depth is representable and the
                // coefficients are evaluable there.
                double x_seed = 0;
                int Kuse = K;
                for (; Kuse >= 0; --Kuse) {
                    GridConfig ec = cfg;
                    ec.levels = cfg.levels + Kuse;
                    if (bs.grid.endpoint_infinite()) ec.x_max = cfg.x_max / std::pow(cfg.sigma, Kuse);
                    try {
                        EndpointGrid ext(prob.interval, side, anchor, ec);
                        x_seed = ext.deepest();
                        if (!(depth_of(x_seed) > 0)) continue;
                        if (!(prob.p_at(x_seed) > 0)) continue;
                        if (!std::isfinite(prob.p_at(x_seed)) || !std::isfinite(prob.r_at(x_seed)) ||
                            !std::isfinite(prob.q(x_seed)))
                            continue;
                        break;
                    } catch (const std::exception&) {
                        continue;
                    }
                }
                if (Kuse < 0)
                    throw std::runtime_error(
                        "base_solutions: coefficients not evaluable at any seeding depth");
                if (Kuse < K) {
                    // Depth floor: no deeper seed exists (an exponential weight
                    // underflows, or the endpoint's own magnitude quantizes away
                    // the deeper grid points).  Handled after the loop.
                    K_floor = Kuse;
                    x_floor = x_seed;
                    break;
                }

                const double rate = seed_rates(x_seed);
                const double s_seed = std::log(depth_of(x_seed));
                OdeTrace t1, t2;
                try {
                    t1 = run_pass(s_seed, principal_side * rate, last_explicit_node);
                    t2 = run_pass(s_seed, principal_side * (3 * rate + 5), last_explicit_node);
                } catch (const std::exception&) {
                    throw std::runtime_error(
                        "base_solutions: outward integration broke down (the problem may "
                        "oscillate at this spectral anchor); supply closed-form hints");
                }
                std::vector<LogValue> u1, du1, u2, du2;
                fill_from_trace(t1, last_explicit_node, u1, du1);
                fill_from_trace(t2, last_explicit_node, u2, du2);
                if (u1[0].is_zero() || u2[0].is_zero())
                    throw std::runtime_error("base_solutions: outward pass vanished at the anchor");
                const int deep = last_explicit_node;
                const LogValue d1 = u1[deep] / u1[0];
                const LogValue d2 = u2[deep] / u2[0];
                const double agree = (d1.is_zero() || d2.is_zero())
                                         ? std::numeric_limits<double>::infinity()
                                         : rel_diff(d1, d2);
                if (agree < agree_best) {
                    agree_best = agree;
                    u_b = std::move(u1);
                    du_b = std::move(du1);
                }
                bs.extension_levels = Kuse;
                if (agree < 1e-10) break;
                if (K >= kMaxExtension) {
                    if (!(agree_best < 1e-6))
                        throw std::runtime_error(
                            "base_solutions: principal direction did not converge (principal "
                            "and nonprincipal behaviour are numerically indistinguishable at "
                            "this endpoint; supply closed-form hints)");
                    break;
                }
                K += 24;
            }
            if (K_floor >= 0) {
                // Equilibrium seeding at a depth floor.  Displaced seeds are
                // useless here: their relaxation transient has no extra depth
                // to decay across, so the usual two-seed agreement saturates at
                // O(1) no matter how well separated the directions are.  But a
                // floor also means the coefficients have essentially reached
                // their endpoint values (that is what made deeper points
                // unevaluable), so the frozen Riccati equilibrium is the
                // principal direction up to adiabatic drift.  Seed one pass at
                // the equilibrium from the floor depth and a control pass at
                // the equilibrium one level shallower; their disagreement
                // outside both relaxation zones bounds the admixture.
                double discA = 0, discB = 0;
                const double LA = frozen_root(x_floor, &discA);
                double x_ctrl = 0;
                int first_ctrl = last_explicit_node;
                if (K_floor >= 1) {
                    GridConfig ec = cfg;
                    ec.levels = cfg.levels + K_floor - 1;
                    if (bs.grid.endpoint_infinite())
                        ec.x_max = cfg.x_max / std::pow(cfg.sigma, K_floor - 1);
                    x_ctrl = EndpointGrid(prob.interval, side, anchor, ec).deepest();
                } else {
                    const int lvl = bs.grid.levels() - 2;
                    x_ctrl = bs.grid.points()[static_cast<std::size_t>(lvl)];
                    first_ctrl = bs.grid.node_of_point(lvl);
                }
                const double LB = frozen_root(x_ctrl, &discB);
                if (!(discA > 0) || !(discB > 0))
                    throw std::runtime_error(
                        "base_solutions: no attracting principal direction at the deepest "
                        "evaluable depth; supply closed-form hints");
                OdeTrace tA, tB;
                try {
                    tA = run_pass(std::log(depth_of(x_floor)), LA, last_explicit_node);
                    tB = run_pass(std::log(depth_of(x_ctrl)), LB, first_ctrl);
                } catch (const std::exception&) {
                    throw std::runtime_error(
                        "base_solutions: outward integration broke down (the problem may "
                        "oscillate at this spectral anchor); supply closed-form hints");
                }
                std::vector<LogValue> uA, duA, uB, duB;
                fill_from_trace(tA, last_explicit_node, uA, duA);
                fill_from_trace(tB, first_ctrl, uB, duB);
                if (uA[0].is_zero() || uB[0].is_zero())
                    throw std::runtime_error("base_solutions: outward pass vanished at the anchor");
                // Compare one full level shallower than the control seed so
                // both relaxation zones lie outside the certified span.
                const int cmp_level =
                    std::max(0, bs.grid.levels() - 1 - std::max(0, 2 - K_floor));
                const int cmp = bs.grid.node_of_point(cmp_level);
                const LogValue dA = uA[cmp] / uA[0];
                const LogValue dB = uB[cmp] / uB[0];
                const double agree = (dA.is_zero() || dB.is_zero())
                                         ? std::numeric_limits<double>::infinity()
                                         : rel_diff(dA, dB);
                if (!(agree < 1e-6))
                    throw std::runtime_error(
                        "base_solutions: principal direction did not converge (principal "
                        "and nonprincipal behaviour are numerically indistinguishable at "
                        "this endpoint; supply closed-form hints)");
                agree_best = agree;
                bs.extension_levels = K_floor;
                u_b = std::move(uA);
                du_b = std::move(duA);
            }
            bs.contamination = agree_best;
            u_expl = std::move(u_b);
            du_expl = std::move(du_b);
        }

        // Assemble u across both regions, then normalize at the anchor.
        for (int i = 0; i <= last_explicit_node; ++i) {
            bs.u[i] = u_expl[i];
            bs.du[i] = du_expl[i];
        }
        if (has_stiff) {
            const LogValue ub = u_expl[last_explicit_node];
            if (ub.is_zero())
                throw std::runtime_error("base_solutions: vanishing match value at the "
                                         "stiffness boundary");
            for (int i = last_explicit_node + 1; i < N; ++i) {
                const double x = nodes[i];
                bs.u[i] = LogValue::from_log(ub.sign, ub.lg + lg_rel[i]);
                const double dlogu =
                    solution_detail::lg_dlogu(prob, lambda_anchor, x, toward_endpoint);
                // u^[1] = p u' = p (dlog u) u
                const double pv = prob.p_at(x);
                bs.du[i] = bs.u[i] * LogValue::from_double(pv * dlogu);
            }
        }
        const LogValue norm = bs.u[0];
        for (int i = 0; i < N; ++i) {
            bs.u[i] = bs.u[i] / norm;
            bs.du[i] = bs.du[i] / norm;
        }
    }

    // Positive normalization near the endpoint (numeric path only; hinted u is
    // authoritative).
    if (!bs.from_hints && bs.u[N - 1].sign < 0)
        for (int i = 0; i < N; ++i) {
            bs.u[i] = -bs.u[i];
            bs.du[i] = -bs.du[i];
        }
    for (int i = 0; i < N; ++i)
        if (bs.u[i].sign == 0 || (!bs.from_hints && bs.u[i].sign < 0))
            throw std::runtime_error(
                "base_solutions: principal solution changes sign inside the working grid; "
                "move the anchor closer to the endpoint");

    // ---- nonprincipal companion by reduction of order ----
    std::vector<LogValue> integrand(N);
    for (int i = 0; i < N; ++i) {
        const double x = bs.grid.nodes()[i];
        integrand[i] = LogValue::one() / (LogValue::from_double(prob.p_at(x)) * bs.u[i] * bs.u[i]);
    }
    const SampledCumulative cum = cumulative_integral(bs.grid, integrand);

    // Principality check: the reduction-of-order integral must diverge toward
    // the endpoint.
    {
        LogValue acc;
        for (const LogValue& s : cum.panel_sums) acc += s;
        const QuadratureOutcome verdict =
            classify_panel_sums(cum.panel_sums, bs.grid.sigma(), acc, cum.err);
        if (verdict.cls == IntegralClass::Convergent)
            throw std::runtime_error(
                "base_solutions: solution taken as principal admits a convergent "
                "reduction-of-order integral (it is nonprincipal); the endpoint may be in a "
                "borderline log regime - supply closed-form hints");
    }

    const LogValue wtarget = LogValue::from_double(bs.wronskian_target());
    for (int i = 0; i < N; ++i) {
        const LogValue I = cum.to_anchor[i];
        bs.v[i] = bs.u[i] * I;
        bs.dv[i] = bs.du[i] * I - wtarget / bs.u[i];
    }
    return bs;
}

} // namespace slreg
