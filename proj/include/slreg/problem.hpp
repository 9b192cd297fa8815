#pragma once

/**
 * @file problem.hpp
 * @brief Three-coefficient Sturm-Liouville problems tau y = (1/r)(-(p y')' + q y).
 *
 * A problem is an open interval (a, b) -- either endpoint may be infinite --
 * together with coefficient evaluators p > 0, r > 0 and real q.  Coefficients
 * are callables; when they come from parsed expressions the analytic
 * derivative is available too (the Liouville transform wants (pr)' exactly).
 *
 * Quasi-derivative convention: y^[1] = p y', and the Wronskian of two
 * solutions is W(f, g) = f g^[1] - f^[1] g, constant in x.
 */

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "slreg/expression.hpp"

namespace slreg {

enum class Side { Left, Right };

inline const char* side_name(Side s) { return s == Side::Left ? "a" : "b"; }
inline Side other_side(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

struct Interval {
    double a = 0.0;
    double b = 1.0;

    static constexpr double inf() { return std::numeric_limits<double>::infinity(); }

    bool left_infinite() const { return std::isinf(a); }
    bool right_infinite() const { return std::isinf(b); }
    double endpoint(Side s) const { return s == Side::Left ? a : b; }
    bool infinite(Side s) const { return std::isinf(endpoint(s)); }
    bool contains(double x) const { return x > a && x < b; }

    /// Distance from x to the given endpoint (infinite for an infinite one).
    double endpoint_distance(double x, Side s) const {
        return s == Side::Left ? x - a : b - x;
    }
};

/// Scalar coefficient function with an optional exact derivative.
class Coefficient {
public:
    Coefficient() = default;

    static Coefficient from_function(std::function<double(double)> f,
                                     std::function<double(double)> df = nullptr) {
        Coefficient c;
        c.f_ = std::move(f);
        c.df_ = std::move(df);
        return c;
    }
    static Coefficient from_expression(const Expression& e) {
        Coefficient c;
        c.expr_ = e;
        c.f_ = [e](double x) { return e(x); };
        Expression d = e.derivative();
        c.df_ = [d](double x) { return d(x); };
        return c;
    }
    static Coefficient constant(double v) {
        Coefficient c;
        c.f_ = [v](double) { return v; };
        c.df_ = [](double) { return 0.0; };
        c.const_value_ = v;
        return c;
    }

    bool valid() const { return static_cast<bool>(f_); }
    double operator()(double x) const { return f_(x); }

    bool has_derivative() const { return static_cast<bool>(df_); }
    double derivative(double x) const {
        if (df_) return df_(x);
        // Central difference fallback, step scaled to the argument.
        const double h = std::max(std::abs(x), 1e-4) * 1e-6;
        return (f_(x + h) - f_(x - h)) / (2 * h);
    }

    bool is_constant(double v) const { return const_value_ && *const_value_ == v; }
    const std::optional<Expression>& expression() const { return expr_; }

private:
    std::function<double(double)> f_;
    std::function<double(double)> df_;
    std::optional<Expression> expr_;
    std::optional<double> const_value_;
};

struct SLProblem {
    std::string label;
    Interval interval;
    Coefficient p, q, r;

    /// True when p == r == 1 identically, i.e. tau = -d2/dx2 + q already.
    bool schrodinger_form = false;

    double p_at(double x) const {
        const double v = p(x);
        if (!(v > 0)) throw std::runtime_error("SLProblem '" + label + "': p(x) must be positive, got p(" +
                                               std::to_string(x) + ") = " + std::to_string(v));
        return v;
    }
    double r_at(double x) const {
        const double v = r(x);
        if (!(v > 0)) throw std::runtime_error("SLProblem '" + label + "': r(x) must be positive, got r(" +
                                               std::to_string(x) + ") = " + std::to_string(v));
        return v;
    }

    static SLProblem schrodinger(std::string label, Interval iv, Coefficient q) {
        SLProblem pr;
        pr.label = std::move(label);
        pr.interval = iv;
        pr.p = Coefficient::constant(1.0);
        pr.q = std::move(q);
        pr.r = Coefficient::constant(1.0);
        pr.schrodinger_form = true;
        return pr;
    }

    static SLProblem from_expressions(std::string label, Interval iv,
                                      const std::string& p_src, const std::string& q_src,
                                      const std::string& r_src) {
        SLProblem pr;
        pr.label = std::move(label);
        pr.interval = iv;
        pr.p = Coefficient::from_expression(Expression::parse(p_src));
        pr.q = Coefficient::from_expression(Expression::parse(q_src));
        pr.r = Coefficient::from_expression(Expression::parse(r_src));
        pr.schrodinger_form = (p_src == "1" && r_src == "1");
        return pr;
    }

    /// Additive potential perturbation q -> q + q0, other data unchanged.
    SLProblem perturbed(const Coefficient& q0, const std::string& suffix = "+q0") const {
        SLProblem pr = *this;
        pr.label = label + suffix;
        const Coefficient base = q;
        auto f = [base, q0](double x) { return base(x) + q0(x); };
        auto df = [base, q0](double x) { return base.derivative(x) + q0.derivative(x); };
        pr.q = Coefficient::from_function(f, df);
        return pr;
    }
};

} // namespace slreg
