#pragma once

/**
 * @file catalog.hpp
 * @brief Built-in problem families with closed-form base solutions.
 *
 * Each factory returns a CatalogEntry bundling the coefficient triple, the
 * recommended series anchors, closed-form principal/nonprincipal pairs where
 * they exist, and (for the power-coefficient family) exact series ladders the
 * test-suite compares against.
 *
 * The central family is the power-coefficient problem on (0, b):
 *
 *     p = x^nu,  r = x^delta,  q = kappa x^(nu-2),
 *     w = 2 + delta - nu > 0,
 *     kappa = [gamma^2 w^2 - (1-nu)^2] / 4,   gamma >= 0,
 *
 * whose solutions at lambda = 0 are pure powers x^{s+-} with
 * s+- = [(1-nu) +- gamma w]/2 (a logarithm joins at gamma = 0).  Its
 * regularization index at 0 is floor(gamma), and the series ladders are
 * monomial:
 *
 *     phi_n   = (-1)^n Gamma(1+gamma) / (w^{2n} n! Gamma(n+1+gamma)) x^{s+ + wn}
 *     theta_n = (-1)^n Gamma(1-gamma) / (gamma w^{2n+1} n! Gamma(n+1-gamma)) x^{s- + wn}
 *
 * (theta_n for noninteger gamma > 0; the gamma = 0 form carries harmonic
 * numbers and a logarithm).  Setting kappa = 0 recovers the q = 0 problem
 * with purely power-law p and r, with gamma = |1-nu| / w.
 *
 * Other families: a Jacobi-type weight on (-1,1) (y = const is an exact
 * solution), an inverse-quartic potential on (0,1) with the exact pair
 * u = x e^{-mu/x}, an x^alpha potential on (0,infinity) whose solutions at
 * the infinite endpoint are modified Bessel functions K/I of order
 * 1/(alpha+2), a Laguerre-type weight pair on (0,infinity), and the free
 * string p = r = 1, q = 0 on (0, pi).
 */

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "slreg/problem.hpp"
#include "slreg/solutions.hpp"

namespace slreg::catalog {

/// sign of Gamma at a real non-pole argument.
inline int gamma_sign(double x) {
    if (x > 0) return 1;
    if (x == std::floor(x)) throw std::domain_error("gamma_sign: pole at nonpositive integer");
    return (static_cast<long long>(std::ceil(-x)) % 2 == 0) ? 1 : -1;
}

/// Closed-form series ladder entry: value and quasi-derivative of term n at x.
using LadderForm = std::function<SolutionSample(int n, double x)>;

struct CatalogEntry {
    std::string name;
    SLProblem problem;
    double anchor_left = 0.0, anchor_right = 0.0; ///< recommended series anchors
    std::optional<SolutionHints> hints_left, hints_right;
    LadderForm phi_closed, theta_closed; ///< left-endpoint ladders (empty when none)
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

/// "x^(e)" with e = 0 and e = 1 simplified away.
inline std::string power_of_x(double e) {
    if (e == 0.0) return "1";
    if (e == 1.0) return "x";
    return "x^(" + num(e) + ")";
}

inline LogValue power_term(double coeff_sign_mag, double exponent, double x) {
    if (coeff_sign_mag == 0.0) return LogValue();
    return LogValue::from_log(coeff_sign_mag,
                              std::log(std::abs(coeff_sign_mag)) + exponent * std::log(x));
}

} // namespace detail

/**
 * Power-coefficient problem on (0, b): p = x^nu, r = x^delta,
 * q = kappa x^(nu-2) with kappa chosen so the solution exponents are
 * s+- = [(1-nu) +- gamma w]/2.  Closed forms at the singular endpoint 0 for
 * every gamma >= 0; the series ladders are attached for noninteger gamma and
 * for gamma = 0.
 */
inline CatalogEntry bessel(double delta, double nu, double gamma, double b = 1.0) {
    if (!(gamma >= 0)) throw std::invalid_argument("bessel: gamma must be >= 0");
    const double w = 2.0 + delta - nu;
    if (!(w > 0)) throw std::invalid_argument("bessel: need 2 + delta - nu > 0");
    const double kappa = (gamma * gamma * w * w - (1.0 - nu) * (1.0 - nu)) / 4.0;
    const double sp = ((1.0 - nu) + gamma * w) / 2.0;
    const double sm = ((1.0 - nu) - gamma * w) / 2.0;

    const std::string q_src =
        (kappa == 0.0) ? "0" : "(" + detail::num(kappa) + ")*" + detail::power_of_x(nu - 2.0);
    CatalogEntry e;
    e.name = "bessel(delta=" + detail::num(delta) + ",nu=" + detail::num(nu) +
             ",gamma=" + detail::num(gamma) + ",b=" + detail::num(b) + ")";
    e.problem = SLProblem::from_expressions(e.name, Interval{0.0, b}, detail::power_of_x(nu),
                                            q_src, detail::power_of_x(delta));
    e.anchor_left = 0.5 * b;
    e.anchor_right = 0.5 * b;

    SolutionHints h;
    h.lambda_anchor = 0.0;
    h.principal = [sp, nu](double x) {
        return SolutionSample{detail::power_term(1.0, sp, x),
                              detail::power_term(sp, nu + sp - 1.0, x)};
    };
    if (gamma > 0) {
        const double c = 1.0 / (gamma * w);
        h.nonprincipal = [sm, nu, c](double x) {
            return SolutionSample{detail::power_term(c, sm, x),
                                  detail::power_term(c * sm, nu + sm - 1.0, x)};
        };
    } else {
        const double s0 = (1.0 - nu) / 2.0;
        h.nonprincipal = [s0, nu](double x) {
            const double L = -std::log(x); // positive near the endpoint
            SolutionSample s;
            s.y = (L == 0.0) ? LogValue()
                             : LogValue::from_log(L, std::log(std::abs(L)) + s0 * std::log(x));
            s.dy = detail::power_term(s0 * L - 1.0, nu + s0 - 1.0, x);
            return s;
        };
    }
    e.hints_left = h;

    e.phi_closed = [gamma, w, sp, nu](int n, double x) {
        const int sign = (n % 2 == 0) ? 1 : -1;
        const double lgc = std::lgamma(1.0 + gamma) - 2.0 * n * std::log(w) -
                           std::lgamma(n + 1.0) - std::lgamma(n + 1.0 + gamma);
        const double ex = sp + w * n;
        SolutionSample s;
        s.y = LogValue::from_log(sign, lgc + ex * std::log(x));
        s.dy = (ex == 0.0) ? LogValue()
                           : LogValue::from_log(sign * (ex > 0 ? 1 : -1),
                                                lgc + std::log(std::abs(ex)) +
                                                    (nu + ex - 1.0) * std::log(x));
        return s;
    };
    if (gamma == 0.0) {
        const double s0 = (1.0 - nu) / 2.0;
        e.theta_closed = [w, s0, nu](int n, double x) {
            double H = 0.0;
            for (int k = 1; k <= n; ++k) H += 1.0 / k;
            const double L = -std::log(x);
            const int sign = (n % 2 == 0) ? 1 : -1;
            const double lgc = -(2.0 * n + 1.0) * std::log(w) - 2.0 * std::lgamma(n + 1.0);
            const double ex = w * n + s0;
            const double val = 2.0 * H + w * L;
            SolutionSample s;
            s.y = (val == 0.0) ? LogValue()
                               : LogValue::from_log(sign * (val > 0 ? 1 : -1),
                                                    lgc + std::log(std::abs(val)) +
                                                        ex * std::log(x));
            const double dval = ex * val - w;
            s.dy = (dval == 0.0) ? LogValue()
                                 : LogValue::from_log(sign * (dval > 0 ? 1 : -1),
                                                      lgc + std::log(std::abs(dval)) +
                                                          (nu + ex - 1.0) * std::log(x));
            return s;
        };
    } else if (gamma != std::floor(gamma)) {
        e.theta_closed = [gamma, w, sm, nu](int n, double x) {
            const int sign = ((n % 2 == 0) ? 1 : -1) * gamma_sign(1.0 - gamma) *
                             gamma_sign(n + 1.0 - gamma);
            const double lgc = std::lgamma(1.0 - gamma) - std::lgamma(n + 1.0 - gamma) -
                               std::log(gamma) - (2.0 * n + 1.0) * std::log(w) -
                               std::lgamma(n + 1.0);
            const double ex = sm + w * n;
            SolutionSample s;
            s.y = LogValue::from_log(sign, lgc + ex * std::log(x));
            s.dy = (ex == 0.0) ? LogValue()
                               : LogValue::from_log(sign * (ex > 0 ? 1 : -1),
                                                    lgc + std::log(std::abs(ex)) +
                                                        (nu + ex - 1.0) * std::log(x));
            return s;
        };
    }
    return e;
}

/// q = 0 with purely power-law p = x^nu, r = x^delta on (0, b): the kappa = 0
/// member of the power-coefficient family, gamma = |1-nu| / (2+delta-nu).
inline CatalogEntry power_endpoint(double nu, double delta, double b = 1.0) {
    const double w = 2.0 + delta - nu;
    if (!(w > 0)) throw std::invalid_argument("power_endpoint: need 2 + delta - nu > 0");
    return bessel(delta, nu, std::abs(1.0 - nu) / w, b);
}

namespace detail {

/**
 * Principal solution at a Jacobi endpoint with negative exponent: when the
 * endpoint factor of p has exponent g + 1 with g in (-1, 0), the integral of
 * 1/p vanishes there like d^(-g) and is therefore the principal solution,
 * with quasi-derivative p u' identically +-1.  With d the endpoint distance
 * and h the *other* endpoint's exponent of p,
 *   u(d) = integral_0^d s^-(g+1) (2-s)^-(h+1) ds
 *        = sum_k 2^-(h+1) C(h+k, k) 2^-k d^(k-g) / (k-g),
 * a positive-term series convergent for d < 2, i.e. across the interval.
 */
inline double jacobi_principal_integral(double g, double h, double d) {
    double coeff = std::pow(2.0, -(h + 1.0));
    double sum = 0.0;
    for (int k = 0; k < 400; ++k) {
        const double term = coeff * std::pow(d, k - g) / (k - g);
        sum += term;
        if (term < 1e-17 * sum) break;
        coeff *= 0.5 * (h + 1.0 + k) / (k + 1.0);
    }
    return sum;
}

} // namespace detail

/**
 * Jacobi-type weight on (-1, 1): p = (1-x)^(a+1) (1+x)^(b+1), q = 0,
 * r = (1-x)^a (1+x)^b.  y = const solves tau y = 0 exactly; it is principal
 * at -1 when b >= 0 and at +1 when a >= 0 (the companion is then built by
 * reduction of order).  For a negative exponent the roles swap: the integral
 * of 1/p becomes principal (it vanishes at that endpoint) and the constant
 * is the nonprincipal companion, both supplied in closed form.
 */
inline CatalogEntry jacobi(double a, double b) {
    if (!(a > -1) || !(b > -1)) throw std::invalid_argument("jacobi: need a, b > -1");
    auto wexp = [](double ea, double eb) {
        std::string s;
        if (ea == 0.0 && eb == 0.0) return std::string("1");
        if (ea != 0.0) s += "(1-x)^(" + detail::num(ea) + ")";
        if (eb != 0.0) {
            if (!s.empty()) s += "*";
            s += "(1+x)^(" + detail::num(eb) + ")";
        }
        return s;
    };
    CatalogEntry e;
    e.name = "jacobi(a=" + detail::num(a) + ",b=" + detail::num(b) + ")";
    e.problem = SLProblem::from_expressions(e.name, Interval{-1.0, 1.0}, wexp(a + 1, b + 1), "0",
                                            wexp(a, b));
    e.anchor_left = 0.0;
    e.anchor_right = 0.0;
    SolutionHints constant_hint;
    constant_hint.lambda_anchor = 0.0;
    constant_hint.principal = [](double) {
        return SolutionSample{LogValue::one(), LogValue()};
    };
    const SolutionSample constant_sample{LogValue::one(), LogValue()};
    if (b >= 0) {
        e.hints_left = constant_hint;
    } else {
        SolutionHints h;
        h.lambda_anchor = 0.0;
        h.principal = [a, b](double x) {
            const double u = detail::jacobi_principal_integral(b, a, 1.0 + x);
            return SolutionSample{LogValue::from_double(u), LogValue::one()};
        };
        h.nonprincipal = [constant_sample](double) { return constant_sample; };
        e.hints_left = h;
    }
    if (a >= 0) {
        e.hints_right = constant_hint;
    } else {
        SolutionHints h;
        h.lambda_anchor = 0.0;
        h.principal = [a, b](double x) {
            const double u = detail::jacobi_principal_integral(a, b, 1.0 - x);
            return SolutionSample{LogValue::from_double(u), -LogValue::one()};
        };
        h.nonprincipal = [constant_sample](double) { return constant_sample; };
        e.hints_right = h;
    }
    return e;
}

/**
 * Inverse-quartic potential on (0, b): p = r = 1, q = mu^2 / x^4.  Exact
 * pair at 0: u = x e^{-mu/x} and v = u * I with
 * I(x) = [e^{2 mu/x} - e^{2 mu/c}] / (2 mu), c the anchor.
 */
inline CatalogEntry mie(double mu, double b = 1.0, double anchor = 0.5) {
    if (!(mu > 0)) throw std::invalid_argument("mie: mu must be positive");
    CatalogEntry e;
    e.name = "mie(mu=" + detail::num(mu) + ",b=" + detail::num(b) + ")";
    e.problem = SLProblem::from_expressions(
        e.name, Interval{0.0, b}, "1", "(" + detail::num(mu * mu) + ")*x^(-4)", "1");
    e.anchor_left = anchor;
    e.anchor_right = 0.5 * b;
    SolutionHints h;
    h.lambda_anchor = 0.0;
    const double c = anchor;
    h.principal = [mu](double x) {
        SolutionSample s;
        s.y = LogValue::from_log(1.0, std::log(x) - mu / x);
        s.dy = LogValue::from_log(1.0, -mu / x + std::log1p(mu / x));
        return s;
    };
    h.nonprincipal = [mu, c, h](double x) {
        const LogValue A = LogValue::from_log(1.0, 2.0 * mu / x - std::log(2.0 * mu));
        const LogValue B = LogValue::from_log(1.0, 2.0 * mu / c - std::log(2.0 * mu));
        const LogValue I = A - B;
        const SolutionSample up = h.principal(x);
        SolutionSample s;
        s.y = up.y * I;
        s.dy = up.dy * I - LogValue::one() / up.y;
        return s;
    };
    e.hints_left = h;
    return e;
}

/**
 * Potential x^alpha on (0, infinity): p = r = 1, q = x^alpha.  The endpoint 0
 * is regular; at infinity the exact pair is
 *
 *     u = sqrt(x) K_ordr(xi),  v = (2/(alpha+2)) sqrt(x) I_ordr(xi),
 *     xi = (2/(alpha+2)) x^{(alpha+2)/2},  ordr = 1/(alpha+2),
 *
 * with W(v,u) = -1.  Large arguments switch to the standard asymptotic
 * expansions of K and I (three correction terms).
 */
inline CatalogEntry power_infinity(double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("power_infinity: alpha must be positive");
    CatalogEntry e;
    e.name = "power_infinity(alpha=" + detail::num(alpha) + ")";
    e.problem = SLProblem::from_expressions(e.name, Interval{0.0, Interval::inf()}, "1",
                                            detail::power_of_x(alpha), "1");
    e.anchor_right = 1.0;

    const double ordr = 1.0 / (alpha + 2.0);
    const double half = 0.5 * (alpha + 2.0);
    const double m4 = 4.0 * ordr * ordr;
    const double a1 = (m4 - 1.0) / 8.0;
    const double a2 = (m4 - 1.0) * (m4 - 9.0) / 128.0;
    const double a3 = (m4 - 1.0) * (m4 - 9.0) * (m4 - 25.0) / 3072.0;

    // (log f, dlog f/dxi) for f = K_ordr and f = I_ordr, via the recurrences
    // K' = -K_{ordr+1} + (ordr/xi) K and I' = I_{ordr+1} + (ordr/xi) I, which
    // only need nonnegative orders.
    auto logK = [=](double xi) -> std::pair<double, double> {
        if (xi < 30.0) {
            const double K = std::cyl_bessel_k(ordr, xi);
            const double Kp = std::cyl_bessel_k(ordr + 1.0, xi);
            return {std::log(K), -Kp / K + ordr / xi};
        }
        const double S = 1.0 + a1 / xi + a2 / (xi * xi) + a3 / (xi * xi * xi);
        const double dS = -a1 / (xi * xi) - 2.0 * a2 / (xi * xi * xi) -
                          3.0 * a3 / (xi * xi * xi * xi);
        return {-xi + 0.5 * std::log(M_PI / (2.0 * xi)) + std::log(S),
                -1.0 - 0.5 / xi + dS / S};
    };
    auto logI = [=](double xi) -> std::pair<double, double> {
        if (xi < 30.0) {
            const double I = std::cyl_bessel_i(ordr, xi);
            const double Ip = std::cyl_bessel_i(ordr + 1.0, xi);
            return {std::log(I), Ip / I + ordr / xi};
        }
        const double S = 1.0 - a1 / xi + a2 / (xi * xi) - a3 / (xi * xi * xi);
        const double dS = a1 / (xi * xi) - 2.0 * a2 / (xi * xi * xi) +
                          3.0 * a3 / (xi * xi * xi * xi);
        return {xi - 0.5 * std::log(2.0 * M_PI * xi) + std::log(S), 1.0 - 0.5 / xi + dS / S};
    };

    SolutionHints h;
    h.lambda_anchor = 0.0;
    h.principal = [=](double x) {
        const double xi = (1.0 / half) * std::pow(x, half);
        const double dxi = std::pow(x, 0.5 * alpha);
        const auto [lk, dlk] = logK(xi);
        SolutionSample s;
        s.y = LogValue::from_log(1.0, 0.5 * std::log(x) + lk);
        const double slope = 0.5 / x + dlk * dxi;
        s.dy = (slope == 0.0) ? LogValue() : s.y * LogValue::from_double(slope);
        return s;
    };
    h.nonprincipal = [=](double x) {
        const double xi = (1.0 / half) * std::pow(x, half);
        const double dxi = std::pow(x, 0.5 * alpha);
        const auto [li, dli] = logI(xi);
        SolutionSample s;
        s.y = LogValue::from_log(1.0, std::log(1.0 / half) + 0.5 * std::log(x) + li);
        const double slope = 0.5 / x + dli * dxi;
        s.dy = (slope == 0.0) ? LogValue() : s.y * LogValue::from_double(slope);
        return s;
    };
    e.hints_right = h;
    return e;
}

/**
 * Laguerre-type weights on (0, infinity): p = x^aL e^{-x}, q = 0,
 * r = x^(aL-1) e^{-x}.  y = const is exactly principal at infinity.
 */
inline CatalogEntry laguerre(double aL) {
    if (!(aL > 0)) throw std::invalid_argument("laguerre: aL must be positive");
    CatalogEntry e;
    e.name = "laguerre(aL=" + detail::num(aL) + ")";
    e.problem = SLProblem::from_expressions(e.name, Interval{0.0, Interval::inf()},
                                            detail::power_of_x(aL) + "*exp(-x)", "0",
                                            detail::power_of_x(aL - 1.0) + "*exp(-x)");
    e.anchor_left = 0.5;
    e.anchor_right = 1.0;
    SolutionHints h;
    h.lambda_anchor = 0.0;
    h.principal = [](double) {
        return SolutionSample{LogValue::one(), LogValue()};
    };
    e.hints_right = h;
    return e;
}

/// Free string: p = r = 1, q = 0 on (0, pi); both endpoints regular.
inline CatalogEntry free_string() {
    CatalogEntry e;
    e.name = "free";
    e.problem = SLProblem::from_expressions(e.name, Interval{0.0, M_PI}, "1", "0", "1");
    e.anchor_left = 1.0;
    e.anchor_right = 2.0;
    return e;
}

/// Parse "bessel(0,0,2.7)", "jacobi(3,3)", "mie(1)", "power_infinity(4)",
/// "laguerre(2.5)", "power_endpoint(3,2)", or "free".
inline CatalogEntry by_name(const std::string& text) {
    auto args_of = [&](std::size_t open) {
        std::vector<double> out;
        std::size_t close = text.rfind(')');
        if (close == std::string::npos || close <= open)
            throw std::invalid_argument("catalog: malformed entry name: " + text);
        std::string inner = text.substr(open + 1, close - open - 1);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            std::size_t comma = inner.find(',', pos);
            if (comma == std::string::npos) comma = inner.size();
            out.push_back(std::stod(inner.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        return out;
    };
    const std::size_t open = text.find('(');
    const std::string head = text.substr(0, open);
    if (head == "free") return free_string();
    if (open == std::string::npos)
        throw std::invalid_argument("catalog: unknown entry: " + text);
    const std::vector<double> a = args_of(open);
    auto want = [&](std::size_t lo, std::size_t hi) {
        if (a.size() < lo || a.size() > hi)
            throw std::invalid_argument("catalog: wrong argument count in: " + text);
    };
    if (head == "bessel") {
        want(3, 4);
        return a.size() == 4 ? bessel(a[0], a[1], a[2], a[3]) : bessel(a[0], a[1], a[2]);
    }
    if (head == "power_endpoint") {
        want(2, 3);
        return a.size() == 3 ? power_endpoint(a[0], a[1], a[2]) : power_endpoint(a[0], a[1]);
    }
    if (head == "jacobi") {
        want(2, 2);
        return jacobi(a[0], a[1]);
    }
    if (head == "mie") {
        want(1, 3);
        if (a.size() == 1) return mie(a[0]);
        return a.size() == 2 ? mie(a[0], a[1]) : mie(a[0], a[1], a[2]);
    }
    if (head == "power_infinity") {
        want(1, 1);
        return power_infinity(a[0]);
    }
    if (head == "laguerre") {
        want(1, 1);
        return laguerre(a[0]);
    }
    throw std::invalid_argument("catalog: unknown entry: " + text);
}

} // namespace slreg::catalog
