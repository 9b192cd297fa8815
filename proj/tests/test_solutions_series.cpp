#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "slreg/catalog.hpp"
#include "slreg/series.hpp"
#include "slreg/solutions.hpp"

using namespace slreg;

namespace {

/// Build base solutions + series for a catalog entry at its left endpoint.
EndpointSeries left_series(const catalog::CatalogEntry& e, bool use_hints = true,
                           SeriesConfig scfg = {}) {
    GridConfig gc;
    BaseSolutions bs =
        base_solutions(e.problem, Side::Left, e.anchor_left, gc, 0.0,
                       use_hints && e.hints_left ? &*e.hints_left : nullptr);
    return EndpointSeries(e.problem, std::move(bs), scfg);
}

double rel_to(const LogValue& got, const LogValue& want) {
    if (want.is_zero()) return got.is_zero() ? 0.0 : 1.0;
    return rel_diff(got, want);
}

} // namespace

TEST_CASE("closed-form hints satisfy the endpoint Wronskian convention") {
    for (const auto& e :
         {catalog::bessel(0, 0, 2.7), catalog::bessel(1, 0, 0.3), catalog::bessel(0, 0, 0),
          catalog::power_endpoint(3, 2), catalog::bessel(0, 0, 0.5, M_PI)}) {
        GridConfig gc;
        BaseSolutions bs =
            base_solutions(e.problem, Side::Left, e.anchor_left, gc, 0.0, &*e.hints_left);
        for (int node : {0, 57, 300, bs.grid.node_count() - 1}) {
            const LogValue W = bs.wronskian(node);
            INFO(e.name << " node " << node);
            CHECK(W.sign == 1);
            CHECK(std::abs(W.lg) < 1e-9);
        }
    }
}

TEST_CASE("reduction of order reproduces the Legendre companion") {
    // p = 1 - x^2, u = 1; the companion with W(v,u)=1 vanishing at the anchor 0
    // is v = (1/2) log((1-x)/(1+x)).
    const auto e = catalog::jacobi(0, 0);
    GridConfig gc;
    BaseSolutions bs =
        base_solutions(e.problem, Side::Left, e.anchor_left, gc, 0.0, &*e.hints_left);
    for (int node : {1, 100, 400, bs.grid.node_count() - 1}) {
        const double x = bs.grid.nodes()[node];
        const double vref = 0.5 * std::log((1 - x) / (1 + x));
        INFO("x = " << x);
        // Grid coordinates within ~1e-6 of the endpoint -1 are themselves
        // quantized at eps * |endpoint| absolute, which perturbs quadrature
        // abscissae by eps/depth in relative terms; the tolerance follows.
        const double depth = 1.0 + x;
        const double tol = (depth > 1e-6) ? 1e-9 : 1e-4;
        CHECK(rel_to(bs.v[node], LogValue::from_double(vref)) < tol);
        CHECK(rel_to(bs.dv[node], LogValue::from_double(-1.0)) < tol);
    }
}

TEST_CASE("outward numeric construction matches power-law closed forms") {
    // Separation exponent 5.4: a single extension round should reach agreement.
    const auto e = catalog::bessel(0, 0, 2.7);
    GridConfig gc;
    BaseSolutions num = base_solutions(e.problem, Side::Left, e.anchor_left, gc);
    BaseSolutions ref =
        base_solutions(e.problem, Side::Left, e.anchor_left, gc, 0.0, &*e.hints_left);
    CHECK(num.contamination < 1e-9);
    const LogValue scale = ref.u[0]; // numeric path normalizes u(anchor) = 1
    for (int node : {3, 57, 300, num.grid.node_count() - 1}) {
        INFO("node " << node);
        CHECK(rel_to(num.u[node], ref.u[node] / scale) < 1e-8);
        CHECK(rel_to(num.du[node], ref.du[node] / scale) < 1e-8);
    }
}

TEST_CASE("outward numeric construction handles a slower separation") {
    // gamma * w = 0.9: several extension rounds are needed.
    const auto e = catalog::bessel(1, 0, 0.3);
    GridConfig gc;
    BaseSolutions num = base_solutions(e.problem, Side::Left, e.anchor_left, gc);
    BaseSolutions ref =
        base_solutions(e.problem, Side::Left, e.anchor_left, gc, 0.0, &*e.hints_left);
    CHECK(num.extension_levels > 8);
    const LogValue scale = ref.u[0];
    for (int node : {3, 300, num.grid.node_count() - 1}) {
        INFO("node " << node);
        CHECK(rel_to(num.u[node], ref.u[node] / scale) < 1e-7);
    }
}

TEST_CASE("indistinguishable log-regime directions are refused") {
    // At gamma = 0 the two behaviours differ only by a logarithm; the numeric
    // path must fail loudly instead of returning a contaminated pair.
    const auto e = catalog::bessel(0, 0, 0);
    GridConfig gc;
    CHECK_THROWS_AS(base_solutions(e.problem, Side::Left, e.anchor_left, gc),
                    std::runtime_error);
}

TEST_CASE("stiff-region construction matches the exact inverse-quartic pair") {
    // q = 1/x^4 separates exponentially; deep levels use the asymptotic form,
    // which is exact for this potential.
    const auto e = catalog::mie(1.0);
    GridConfig gc;
    BaseSolutions num = base_solutions(e.problem, Side::Left, e.anchor_left, gc);
    CHECK(num.stiff_levels > 0);
    BaseSolutions ref =
        base_solutions(e.problem, Side::Left, e.anchor_left, gc, 0.0, &*e.hints_left);
    const LogValue scale = ref.u[0];
    for (int node : {3, 57, 300}) {
        INFO("node " << node << " x = " << num.grid.nodes()[node]);
        CHECK(rel_to(num.u[node], ref.u[node] / scale) < 1e-7);
        CHECK(rel_to(num.du[node], ref.du[node] / scale) < 1e-7);
    }
    // The deepest node sits at log|u| ~ -2e12; accumulating that integral in
    // double precision carries an absolute log error near eps * |log u|, so
    // the comparison is made between logarithms rather than values.
    const int deep = num.grid.node_count() - 1;
    {
        const LogValue want_u = ref.u[deep] / scale;
        const LogValue want_du = ref.du[deep] / scale;
        CHECK(num.u[deep].sign == want_u.sign);
        CHECK(std::abs(num.u[deep].lg - want_u.lg) < 1e-2);
        CHECK(num.du[deep].sign == want_du.sign);
        CHECK(std::abs(num.du[deep].lg - want_du.lg) < 1e-2);
    }
}

TEST_CASE("stiff-region construction tracks the modified-Bessel pair at infinity") {
    const auto e = catalog::power_infinity(4);
    GridConfig gc;
    BaseSolutions num = base_solutions(e.problem, Side::Right, e.anchor_right, gc);
    CHECK(num.stiff_levels > 0);
    BaseSolutions ref =
        base_solutions(e.problem, Side::Right, e.anchor_right, gc, 0.0, &*e.hints_right);
    const LogValue scale = ref.u[0];
    // Shallow (explicitly integrated) nodes are accurate to integration
    // tolerance; deep nodes carry the asymptotic model's own error.
    CHECK(rel_to(num.u[48], ref.u[48] / scale) < 1e-7);
    const int deep = num.grid.node_count() - 1;
    CHECK(rel_to(num.u[deep], ref.u[deep] / scale) < 2e-3);
}

TEST_CASE("constant-principal reduction at infinity for Laguerre-type weights") {
    const auto e = catalog::laguerre(2.5);
    GridConfig gc;
    BaseSolutions bs =
        base_solutions(e.problem, Side::Right, e.anchor_right, gc, 0.0, &*e.hints_right);
    // v(x) = integral from 1 to x of t^{-2.5} e^t dt, checked at x = 8.
    const int node = bs.grid.find_node(8.0, 1e-12);
    REQUIRE(node >= 0);
    const auto f = [](double t) { return std::pow(t, -2.5) * std::exp(t); };
    double acc = 0; // 100k-point midpoint rule is plenty at this tolerance
    const int M = 100000;
    for (int i = 0; i < M; ++i) {
        const double t = 1.0 + (8.0 - 1.0) * (i + 0.5) / M;
        acc += f(t) * (8.0 - 1.0) / M;
    }
    CHECK(rel_to(bs.v[node], LogValue::from_double(acc)) < 1e-6);
}

TEST_CASE("series ladder reproduces the sine expansion exactly") {
    // p = r = 1, q = 3/(4x^2) ... gamma = 1/2 gives phi(z,x) = sin(sqrt z x)/sqrt z
    // about z0 = 0: phi_1 = -x^3/6, phi_2 = x^5/120, and the companion ladder
    // theta_1 = -x^2/2, theta_2 = x^4/24.
    const auto e = catalog::bessel(0, 0, 0.5);
    EndpointSeries s = left_series(e);
    s.ensure_phi(2);
    // theta pairing at depth 0 is already integrable; the ladder is natural.
    s.extend_theta_natural();
    s.extend_theta_natural();
    for (int node : {5, 57, 300}) {
        const double x = s.grid().nodes()[node];
        INFO("x = " << x);
        CHECK(rel_to(s.phi(1)[node], LogValue::from_double(-x * x * x / 6)) < 1e-10);
        CHECK(rel_to(s.phi(2)[node], LogValue::from_double(std::pow(x, 5) / 120)) < 1e-10);
        CHECK(rel_to(s.theta(1)[node], LogValue::from_double(-x * x / 2)) < 1e-10);
        CHECK(rel_to(s.theta(2)[node], LogValue::from_double(std::pow(x, 4) / 24)) < 1e-10);
        CHECK(rel_to(s.dphi(1)[node], LogValue::from_double(-x * x / 2)) < 1e-10);
        CHECK(rel_to(s.dtheta(2)[node], LogValue::from_double(x * x * x / 6)) < 1e-10);
    }
}

TEST_CASE("series evaluation sums to the closed solution") {
    const auto e = catalog::bessel(0, 0, 0.5);
    EndpointSeries s = left_series(e);
    const int node = 5; // shallow: x close to the anchor 0.5
    const double x = s.grid().nodes()[node];

    const std::complex<double> z{1.3, 0.9};
    const std::complex<double> rt = std::sqrt(z);
    const auto val = s.eval_phi(z, node);
    const std::complex<double> expect = std::sin(rt * x) / rt;
    CHECK(std::abs(val.y.to_complex() - expect) / std::abs(expect) < 1e-10);
    const std::complex<double> dexpect = std::cos(rt * x);
    CHECK(std::abs(val.dy.to_complex() - dexpect) / std::abs(dexpect) < 1e-10);
    CHECK(val.tail_rel < 1e-10);
}

TEST_CASE("full ladder comparison against closed forms") {
    // Three parameter points, terms through n = 6, both ladders, including the
    // anchor-constant cancellation for the depth-2 point.
    struct Point {
        double delta, nu, gamma;
        int index; // floor(gamma): pre-index ladder length
    };
    for (const Point pt : {Point{0, 0, 0.5, 0}, Point{0, 0, 2.7, 2}, Point{1, 0, 0.3, 0}}) {
        const auto e = catalog::bessel(pt.delta, pt.nu, pt.gamma);
        EndpointSeries s = left_series(e);
        s.ensure_phi(6);
        for (int n = 1; n <= pt.index; ++n) s.extend_theta_pre_index();
        while (s.theta_count() <= 6) s.extend_theta_natural();
        for (int n = 0; n <= 6; ++n) {
            for (int node : {5, 57, 300, 500}) {
                const double x = s.grid().nodes()[node];
                const SolutionSample phi_ref = e.phi_closed(n, x);
                const SolutionSample th_ref = e.theta_closed(n, x);
                INFO(e.name << " n = " << n << " x = " << x);
                CHECK(rel_to(s.phi(n)[node], phi_ref.y) < 1e-6);
                CHECK(rel_to(s.dphi(n)[node], phi_ref.dy) < 1e-6);
                CHECK(rel_to(s.theta(n)[node], th_ref.y) < 1e-6);
                CHECK(rel_to(s.dtheta(n)[node], th_ref.dy) < 1e-6);
            }
        }
    }
}

TEST_CASE("pairing integrability scan finds the expected depth") {
    // gamma = 2.7: pairings at depths 0 and 1 diverge, depth 2 is integrable.
    const auto e = catalog::bessel(0, 0, 2.7);
    EndpointSeries s = left_series(e);
    CHECK(s.pairing_verdict(0).divergent());
    s.extend_theta_pre_index();
    CHECK(s.pairing_verdict(1).divergent());
    s.extend_theta_pre_index();
    CHECK(s.pairing_verdict(2).cls == IntegralClass::Convergent);
}

TEST_CASE("integrability hypothesis verdicts across the catalog") {
    GridConfig gc;
    auto verdict = [&](const catalog::CatalogEntry& e, Side side, double anchor,
                       const std::optional<SolutionHints>& h) {
        BaseSolutions bs = base_solutions(e.problem, side, anchor, gc, 0.0, h ? &*h : nullptr);
        EndpointSeries s(e.problem, std::move(bs), SeriesConfig{});
        return s.hypothesis_verdict().cls;
    };
    // Holds: |uv| r integrable at the endpoint.
    {
        const auto e = catalog::bessel(0, 0, 2.7);
        CHECK(verdict(e, Side::Left, e.anchor_left, e.hints_left) == IntegralClass::Convergent);
    }
    {
        const auto e = catalog::mie(1.0);
        CHECK(verdict(e, Side::Left, e.anchor_left, e.hints_left) == IntegralClass::Convergent);
    }
    {
        const auto e = catalog::power_infinity(4);
        CHECK(verdict(e, Side::Right, e.anchor_right, e.hints_right) ==
              IntegralClass::Convergent);
    }
    // Fails: uv r ~ x^{-1/2} (power) and ~ 1/x (log) at infinity.
    {
        const auto e = catalog::power_infinity(1);
        CHECK(verdict(e, Side::Right, e.anchor_right, e.hints_right) ==
              IntegralClass::DivergentPower);
    }
    {
        const auto e = catalog::laguerre(2.5);
        CHECK(verdict(e, Side::Right, e.anchor_right, e.hints_right) ==
              IntegralClass::DivergentLog);
    }
}
