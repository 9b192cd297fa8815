/**
 * @file test_spectral.cpp
 * @brief Eigenvalue computation, growth fits, m-functions, and the
 *        resolvent-trace cross-check, validated against closed forms.
 *
 * Oracles used below, each obtainable by hand:
 *  - Free string on (0, pi), Dirichlet both ends: y = sin(n x), lambda_n = n^2.
 *  - Radial l = 1 problem q = 2/x^2 on (0, b), Friedrichs at 0 and Dirichlet
 *    at b: solutions regular at the origin are x -> sin(kx)/(kx) - cos(kx)
 *    (k = sqrt(lambda)), so eigenvalues solve tan(kb) = kb.  The first three
 *    positive roots of tan w = w are 4.493409457909064, 7.725251836937707,
 *    10.904121659428899.
 *  - The squares of those roots obey the classical inverse-square sum
 *    sum_n w_n^{-2} = 1/10, which fixes the resolvent trace of the
 *    restricted problem at lambda = 0 to c^2 / 10 on (0, c).
 *  - sum_{n>=1} 1/(n^2 pi^2 + mu^2) = (mu coth mu - 1) / (2 mu^2), the
 *    resolvent trace of the Dirichlet problem on (0, 1) at lambda = -mu^2.
 *  - Dirichlet on (0, 1): m(z) = -sqrt(z) cos(sqrt z) / sin(sqrt z), the
 *    multiplier that makes cos(sqrt z x) + m sin(sqrt z x)/sqrt(z) vanish at
 *    x = 1; at z = -1 this is -coth(1).
 *  - Potential x^alpha on (0, inf): the phase-integral quantization
 *    n pi ~ lambda^{(alpha+2)/(2 alpha)} * B(1/alpha, 3/2)/alpha gives
 *    lambda_n ~ A n^{2 alpha/(alpha+2)} with
 *    A = (2 sqrt(pi) alpha Gamma(3/2 + 1/alpha) / Gamma(1/alpha))^{2 alpha/(alpha+2)}.
 */
#include <catch2/catch_amalgamated.hpp>

#include "slreg/catalog.hpp"
#include "slreg/spectral.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

using namespace slreg;

namespace {

constexpr double kTanRoots[3] = {4.493409457909064, 7.725251836937707, 10.904121659428899};

EigenConfig fast_config() {
    EigenConfig cfg;
    cfg.ode.rtol = 1e-9;
    cfg.ode.atol = 1e-12;
    return cfg;
}

std::complex<double> free_m_closed(std::complex<double> z) {
    const std::complex<double> w = std::sqrt(z);
    return -w * std::cos(w) / std::sin(w);
}

}  // namespace

TEST_CASE("free string eigenvalues match the squared integers") {
    const auto entry = catalog::free_string();
    const Spectrum sp =
        eigenvalues(entry.problem, BcSpec::dirichlet(), BcSpec::dirichlet(), 6);
    REQUIRE(sp.eigenvalues.size() == 6);
    CHECK(sp.stages.empty());
    for (int n = 1; n <= 6; ++n) {
        const double lam = sp.eigenvalues[static_cast<std::size_t>(n - 1)];
        CHECK(std::abs(lam - n * n) <= 1e-8 * n * n);
    }
}

TEST_CASE("radial l=1 eigenvalues solve tan w = w") {
    auto entry = catalog::bessel(0.0, 0.0, 1.5, M_PI);  // q = 2/x^2 on (0, pi)
    const BcSpec left = BcSpec::principal(&*entry.hints_left, entry.anchor_left);
    const Spectrum sp = eigenvalues(entry.problem, left, BcSpec::dirichlet(), 3);
    REQUIRE(sp.eigenvalues.size() == 3);
    REQUIRE(sp.stages.size() == 3);
    for (int n = 0; n < 3; ++n) {
        const double expect = std::pow(kTanRoots[n] / M_PI, 2.0);
        CHECK(std::abs(sp.eigenvalues[static_cast<std::size_t>(n)] - expect) <=
              1e-6 * expect);
        CHECK(sp.residuals[static_cast<std::size_t>(n)] < 1e-5);
    }

    SECTION("the reported value does not depend on the anchor choice") {
        const BcSpec other = BcSpec::principal(&*entry.hints_left, 1.0);
        const Spectrum sp2 = eigenvalues(entry.problem, other, BcSpec::dirichlet(), 1);
        CHECK(std::abs(sp2.eigenvalues[0] - sp.eigenvalues[0]) <=
              1e-7 * sp.eigenvalues[0]);
    }
}

TEST_CASE("interval truncation approaches eigenvalues monotonically from above") {
    auto entry = catalog::bessel(0.0, 0.0, 1.5, M_PI);
    const BcSpec left = BcSpec::principal(&*entry.hints_left, entry.anchor_left);
    const double full =
        eigenvalues(entry.problem, left, BcSpec::dirichlet(), 1).eigenvalues[0];

    double prev = std::numeric_limits<double>::infinity();
    for (int k = 6; k <= 8; ++k) {
        const double eps = M_PI * std::pow(0.5, k);
        const SLProblem cut = restrict_interval(entry.problem, eps, M_PI);
        const double lam =
            eigenvalues(cut, BcSpec::dirichlet(), BcSpec::dirichlet(), 1).eigenvalues[0];
        CHECK(lam < prev);
        CHECK(lam > full - 1e-9);
        prev = lam;
    }
    CHECK(prev - full < 1e-3);  // deepest truncation is already close
}

TEST_CASE("eigenvalue growth follows the length prediction for the free string") {
    const auto entry = catalog::free_string();
    const Spectrum sp =
        eigenvalues(entry.problem, BcSpec::dirichlet(), BcSpec::dirichlet(), 24);
    const WeylFit w = weyl_fit(sp, entry.problem);
    CHECK(w.length_finite);
    CHECK(std::abs(w.length - M_PI) < 1e-8);
    CHECK(w.verdict == GrowthVerdict::WeylHolds);
    CHECK(std::abs(w.gamma_hat - 2.0) < 0.05);
    CHECK(std::abs(w.a_hat * w.length * w.length / (M_PI * M_PI) - 1.0) < 0.1);
    CHECK(std::abs(pinned_prefactor(sp, 2.0) - 1.0) < 1e-6);
}

TEST_CASE("quartic potential growth is a clean power law with the predicted prefactor") {
    auto entry = catalog::power_infinity(4.0);
    const BcSpec right = BcSpec::principal(&*entry.hints_right, entry.anchor_right);
    const Spectrum sp =
        eigenvalues(entry.problem, BcSpec::dirichlet(), right, 12, fast_config());
    REQUIRE(sp.eigenvalues.size() == 12);

    const WeylFit w = weyl_fit(sp, entry.problem);
    CHECK_FALSE(w.length_finite);
    CHECK(w.verdict == GrowthVerdict::PowerLaw);
    const double expo = 2.0 * 4.0 / (4.0 + 2.0);  // 4/3
    CHECK(std::abs(w.gamma_hat - expo) < 0.05);

    const double A = std::pow(
        2.0 * std::sqrt(M_PI) * 4.0 * std::tgamma(1.5 + 0.25) / std::tgamma(0.25), expo);
    CHECK(std::abs(pinned_prefactor(sp, expo) / A - 1.0) < 0.1);
}

TEST_CASE("inverse-quartic barrier keeps the length prediction") {
    auto entry = catalog::mie(1.0);
    const BcSpec left = BcSpec::principal(&*entry.hints_left, entry.anchor_left);
    const Spectrum sp =
        eigenvalues(entry.problem, left, BcSpec::dirichlet(), 25, fast_config());
    REQUIRE(sp.eigenvalues.size() == 25);
    CHECK(sp.residuals[0] < 1e-8);  // barrier cutoff: truncation already converged

    const WeylFit w = weyl_fit(sp, entry.problem);
    CHECK(w.length_finite);
    CHECK(std::abs(w.length - 1.0) < 1e-8);
    CHECK(w.verdict == GrowthVerdict::WeylHolds);
    CHECK(std::abs(w.gamma_hat - 2.0) < 0.05);
    CHECK(std::abs(w.a_hat * w.length * w.length / (M_PI * M_PI) - 1.0) < 0.1);
}

TEST_CASE("inverse-square endpoint keeps the length prediction") {
    auto entry = catalog::bessel(0.0, 0.0, 2.7);  // q = 7.04/x^2 on (0,1)
    const BcSpec left = BcSpec::principal(&*entry.hints_left, entry.anchor_left);
    const Spectrum sp = eigenvalues(entry.problem, left, BcSpec::dirichlet(), 20);
    const WeylFit w = weyl_fit(sp, entry.problem);
    CHECK(w.length_finite);
    CHECK(std::abs(w.length - 1.0) < 1e-10);
    CHECK(w.verdict == GrowthVerdict::WeylHolds);
    CHECK(std::abs(w.gamma_hat - 2.0) < 0.05);
    CHECK(std::abs(w.a_hat * w.length * w.length / (M_PI * M_PI) - 1.0) < 0.1);
}

TEST_CASE("m-function matches the closed form on the free interval") {
    const SLProblem prob = restrict_interval(catalog::free_string().problem, 0.0, 1.0);
    const MBase base = regular_m_base(prob);

    SECTION("negative real axis") {
        const MFunctionEval e =
            m_function(prob, base, {-1.0, 0.0}, BcSpec::dirichlet(), 0.3, 0.7);
        const double expect = -1.0 / std::tanh(1.0);
        CHECK(e.status == MStatus::Ok);
        CHECK(std::abs(e.m.real() - expect) <= 1e-6 * std::abs(expect));
        CHECK(std::abs(e.m.imag()) < 1e-8);
        CHECK(e.x0_sensitivity < 1e-8);
    }

    SECTION("upper half plane, reflection, and the closed form") {
        const std::complex<double> zi(0.0, 1.0);
        const MFunctionEval ei = m_function(prob, base, zi, BcSpec::dirichlet(), 0.3, 0.7);
        CHECK(ei.m.imag() > 0.0);
        CHECK(std::abs(ei.m - free_m_closed(zi)) < 1e-8 * std::abs(free_m_closed(zi)));

        const std::complex<double> z(0.3, 0.7);
        const MFunctionEval up = m_function(prob, base, z, BcSpec::dirichlet(), 0.3, 0.7);
        const MFunctionEval dn =
            m_function(prob, base, std::conj(z), BcSpec::dirichlet(), 0.3, 0.7);
        CHECK(std::abs(dn.m - std::conj(up.m)) < 1e-10 * std::abs(up.m));
        CHECK(std::abs(up.m - free_m_closed(z)) < 1e-8 * std::abs(free_m_closed(z)));
    }

    SECTION("an eigenvalue of the interval flags pole proximity") {
        const MFunctionEval e = m_function(prob, base, {M_PI * M_PI, 0.0},
                                           BcSpec::dirichlet(), 0.3, 0.7);
        CHECK(e.status == MStatus::PoleProximity);
    }
}

TEST_CASE("resolvent trace agrees between spectrum and diagonal kernel on the free string") {
    const SLProblem prob = catalog::free_string().problem;
    BaseSolutions bs = base_solutions(prob, Side::Left, 1.0, GridConfig{});
    EndpointSeries es(prob, std::move(bs));

    const SLProblem cut = restrict_interval(prob, 0.0, 1.0);
    const Spectrum sp = eigenvalues(cut, BcSpec::dirichlet(), BcSpec::dirichlet(), 30);

    SECTION("at lambda = 0 the trace is 1/6") {
        const TraceCheck tc = trace_check(prob, es, 0.0, sp);
        REQUIRE_FALSE(tc.refused);
        REQUIRE_FALSE(tc.inconclusive);
        CHECK(tc.agree);
        CHECK(std::abs(tc.lhs - 1.0 / 6.0) < 1e-3 / 6.0);
        CHECK(std::abs(tc.rhs - 1.0 / 6.0) < 1e-3 / 6.0);
    }

    SECTION("below the spectrum the coth closed form holds") {
        const double mu = std::sqrt(2.5);
        const double expect = (mu / std::tanh(mu) - 1.0) / (2.0 * mu * mu);
        const TraceCheck tc = trace_check(prob, es, -2.5, sp);
        CHECK(tc.agree);
        CHECK(std::abs(tc.lhs - expect) < 1e-3 * expect);
        CHECK(std::abs(tc.rhs - expect) < 1e-3 * expect);
    }
}

TEST_CASE("resolvent trace agrees for the radial l=1 problem") {
    auto entry = catalog::bessel(0.0, 0.0, 1.5);  // q = 2/x^2 on (0, 1)
    const SLProblem& prob = entry.problem;
    const double c = 0.5;
    BaseSolutions bs =
        base_solutions(prob, Side::Left, c, GridConfig{}, 0.0, &*entry.hints_left);
    EndpointSeries es(prob, std::move(bs));

    const SLProblem cut = restrict_interval(prob, 0.0, c);
    const BcSpec left = BcSpec::principal(&*entry.hints_left, 0.25);
    const Spectrum sp = eigenvalues(cut, left, BcSpec::dirichlet(), 30);

    const double expect = c * c / 10.0;  // inverse-square sum of the tan w = w roots
    const TraceCheck tc = trace_check(prob, es, 0.0, sp);
    REQUIRE_FALSE(tc.refused);
    REQUIRE_FALSE(tc.inconclusive);
    CHECK(tc.agree);
    CHECK(std::abs(tc.lhs - expect) < 1e-3 * expect);
    CHECK(std::abs(tc.rhs - expect) < 1e-3 * expect);
}

TEST_CASE("trace check refuses an endpoint without the pairing hypothesis") {
    auto entry = catalog::laguerre(2.5);
    const SLProblem& prob = entry.problem;
    BaseSolutions bs = base_solutions(prob, Side::Right, entry.anchor_right, GridConfig{},
                                      0.0, &*entry.hints_right);
    EndpointSeries es(prob, std::move(bs));
    const TraceCheck tc = trace_check(prob, es, 0.0, Spectrum{});
    CHECK(tc.refused);
    CHECK_FALSE(tc.agree);
    CHECK(tc.note.find("divergent") != std::string::npos);
}

TEST_CASE("potential growth never lowers eigenvalues") {
    const Interval iv{0.0, M_PI};
    const Spectrum base = eigenvalues(SLProblem::schrodinger("flat", iv, Coefficient::constant(0.0)),
                                      BcSpec::dirichlet(), BcSpec::dirichlet(), 4);
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (int trial = 0; trial < 3; ++trial) {
        const double c0 = U(rng), c1 = U(rng), c2 = U(rng);
        auto q = [c0, c1, c2](double x) {
            const double s = std::sin(3.0 * x);
            return c0 + c1 * s * s + c2 * x * (M_PI - x) / 2.0;
        };
        const SLProblem prob = SLProblem::schrodinger(
            "bumpy", iv, Coefficient::from_function(q));
        const Spectrum sp = eigenvalues(prob, BcSpec::dirichlet(), BcSpec::dirichlet(), 4);
        for (std::size_t n = 0; n < 4; ++n)
            CHECK(sp.eigenvalues[n] >= base.eigenvalues[n] - 1e-9);
    }
}

TEST_CASE("spectrum csv round-trips") {
    Spectrum sp;
    sp.eigenvalues = {1.0, 4.0, 9.0};
    sp.residuals = {1e-11, 2e-11, 3e-11};
    std::ostringstream os;
    write_spectrum_csv(os, sp);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "n,lambda,eps_residual");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}
