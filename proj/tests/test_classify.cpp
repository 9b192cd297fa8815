/**
 * @file test_classify.cpp
 * @brief Endpoint classification: nonoscillation, limit circle vs limit
 *        point, the trace-class pairing property, regularization indices,
 *        square-integrability profiles, perturbation stability, and the
 *        equivalence crosscheck at two spectral points.
 *
 * Expected verdicts for the power-type families follow from the endpoint
 * exponents.  With p ~ d^nu and r ~ d^delta in the endpoint distance d, the
 * principal/nonprincipal pair behaves like d^{s+}, d^{s-} with
 * s+- = ((1-nu) +- gamma w)/2 and w = 2 + delta - nu, so every pairing and
 * ratio verdict below reduces to a power-counting exercise done once by
 * hand; the expected index is floor(gamma).
 */
#include <catch2/catch_amalgamated.hpp>

#include "slreg/catalog.hpp"
#include "slreg/classify.hpp"

#include <cmath>
#include <utility>
#include <vector>

using namespace slreg;

namespace {

/// Anchored series for one endpoint of a catalog entry, using the attached
/// closed-form pair when it is anchored at the requested spectral point.
EndpointSeries series_for(const catalog::CatalogEntry& e, Side side, const ClassifyConfig& cfg = {}) {
    const double anchor = side == Side::Left ? e.anchor_left : e.anchor_right;
    const auto& hints = side == Side::Left ? e.hints_left : e.hints_right;
    const SolutionHints* h =
        (hints && hints->lambda_anchor == cfg.lambda_anchor) ? &*hints : nullptr;
    BaseSolutions base = base_solutions(e.problem, side, anchor, cfg.grid, cfg.lambda_anchor, h);
    return EndpointSeries(e.problem, std::move(base), SeriesConfig{cfg.n_max, true});
}

LcLp lc_of(const catalog::CatalogEntry& e, Side side) {
    EndpointSeries s = series_for(e, side);
    return lc_lp_classify(s).verdict;
}

TraceClass trace_of(const catalog::CatalogEntry& e, Side side) {
    const ClassifyConfig cfg;
    EndpointSeries s = series_for(e, side, cfg);
    const double anchor = side == Side::Left ? e.anchor_left : e.anchor_right;
    return hypothesis_check(e.problem, side, anchor, cfg, s).verdict;
}

IndexResult index_of(const catalog::CatalogEntry& e, Side side) {
    const ClassifyConfig cfg;
    EndpointSeries s = series_for(e, side, cfg);
    return regularization_index(s, cfg.n_max);
}

} // namespace

TEST_CASE("nonoscillation verdicts for constant and power coefficients") {
    // Regular endpoint: solutions 1 and x, no zeros accumulate.
    const catalog::CatalogEntry fs = catalog::free_string();
    CHECK(nonoscillation_check(fs.problem, Side::Left, fs.anchor_left, 0.0) == Tri::Yes);

    // Toward infinity with -y'' = z y: exponential pair at z = -1 (no zeros),
    // trigonometric pair at z = +1 (zeros at every half period).
    const SLProblem line =
        SLProblem::from_expressions("half-line", Interval{0.0, Interval::inf()}, "1", "0", "1");
    CHECK(nonoscillation_check(line, Side::Right, 1.0, -1.0) == Tri::Yes);
    CHECK(nonoscillation_check(line, Side::Right, 1.0, 1.0) == Tri::No);

    // Inverse-square well at the critical coupling -1/4: still nonoscillatory
    // (both solutions ~ sqrt(x) with a log between them).
    const SLProblem crit = SLProblem::from_expressions("critical well", Interval{0.0, 1.0}, "1",
                                                       "(-0.25)*x^(-2)", "1");
    CHECK(nonoscillation_check(crit, Side::Left, 0.5, 0.0) == Tri::Yes);

    // Below the critical coupling the solutions spiral: sin(k log x) zeros
    // accumulate at the endpoint.
    const SLProblem sub = SLProblem::from_expressions("subcritical well", Interval{0.0, 1.0}, "1",
                                                      "(-1.0)*x^(-2)", "1");
    CHECK(nonoscillation_check(sub, Side::Left, 0.5, 0.0) == Tri::No);

    // Strongly singular endpoint, convex case: q = 1/x^4 dominates.
    const catalog::CatalogEntry m = catalog::mie(1.0);
    CHECK(nonoscillation_check(m.problem, Side::Left, m.anchor_left, 0.0) == Tri::Yes);
}

TEST_CASE("limit circle versus limit point across the catalog") {
    // v ~ d^{s-}: square-integrability of v^2 r decides the verdict, and for
    // the power families that is gamma < 1 vs gamma >= 1.
    CHECK(lc_of(catalog::bessel(0, 0, 0.5), Side::Left) == LcLp::LimitCircle);
    CHECK(lc_of(catalog::bessel(0, 0, 0.0), Side::Left) == LcLp::LimitCircle); // log borderline
    CHECK(lc_of(catalog::bessel(0, 0, 1.5), Side::Left) == LcLp::LimitPoint);
    // Interval weight with one negative exponent: effective gamma is |b| at
    // the left factor and |a| at the right one.
    const catalog::CatalogEntry j = catalog::jacobi(2.5, -0.5);
    CHECK(lc_of(j, Side::Left) == LcLp::LimitCircle);
    CHECK(lc_of(j, Side::Right) == LcLp::LimitPoint);
    CHECK(lc_of(catalog::jacobi(0, 0), Side::Left) == LcLp::LimitCircle);
}

TEST_CASE("trace-class verdicts across the catalog") {
    // Holds whenever u v r is integrable at the endpoint; the secondary
    // principal-ratio check must concur at two spectral points.
    CHECK(trace_of(catalog::bessel(0, 0, 2.7), Side::Left) == TraceClass::Holds);
    CHECK(trace_of(catalog::bessel(1, 0, 0.3), Side::Left) == TraceClass::Holds);
    CHECK(trace_of(catalog::bessel(0, 0, 0.0), Side::Left) == TraceClass::Holds);
    CHECK(trace_of(catalog::jacobi(0, 0), Side::Left) == TraceClass::Holds);
    CHECK(trace_of(catalog::mie(1.0), Side::Left) == TraceClass::Holds);
    CHECK(trace_of(catalog::power_infinity(4.0), Side::Right) == TraceClass::Holds);
    // u v r ~ x^{-2/(alpha+2) ... } decays too slowly once alpha <= 2.
    CHECK(trace_of(catalog::power_infinity(1.0), Side::Right) == TraceClass::Fails);
    // u v r ~ 1/x toward infinity: logarithmically divergent pairing.
    CHECK(trace_of(catalog::laguerre(2.5), Side::Right) == TraceClass::Fails);
}

TEST_CASE("regularization index equals floor(gamma) for power endpoints") {
    const std::vector<std::pair<double, int>> table = {
        {0.3, 0}, {0.5, 0}, {1.5, 1}, {2.7, 2}};
    for (const auto& [gamma, expect] : table) {
        INFO("gamma = " << gamma);
        const IndexResult r = index_of(catalog::bessel(0, 0, gamma), Side::Left);
        REQUIRE(r.index.kind == IndexKind::Finite);
        CHECK(r.index.value == expect);
        CHECK(r.l_pairing == expect);
        CHECK(r.l_ratio == expect);
        CHECK(r.faults.empty());
    }

    // Logarithmic borderline: gamma = 0 still has index 0 (the pairing
    // integral gains a log^2 factor but stays convergent).
    const IndexResult r0 = index_of(catalog::bessel(0, 0, 0.0), Side::Left);
    REQUIRE(r0.index.kind == IndexKind::Finite);
    CHECK(r0.index.value == 0);
    CHECK(r0.faults.empty());
}

TEST_CASE("regularization index at resonant integer exponents") {
    // gamma = 2 exactly: the pairing walks d^{-2}, d^{-1} (log-divergent),
    // log d (convergent) -- the index lands on the borderline rung.
    const IndexResult pe = index_of(catalog::power_endpoint(3, 2), Side::Left);
    REQUIRE(pe.index.kind == IndexKind::Finite);
    CHECK(pe.index.value == 2);
    CHECK(pe.faults.empty());

    // Interval weight (1-x)^a (1+x)^b: index floor(|b|) at the left factor,
    // floor(|a|) at the right one.
    const catalog::CatalogEntry j = catalog::jacobi(2.5, -0.5);
    const IndexResult jl = index_of(j, Side::Left);
    REQUIRE(jl.index.kind == IndexKind::Finite);
    CHECK(jl.index.value == 0);
    const IndexResult jr = index_of(j, Side::Right);
    REQUIRE(jr.index.kind == IndexKind::Finite);
    CHECK(jr.index.value == 2);

    const IndexResult leg = index_of(catalog::jacobi(0, 0), Side::Left);
    REQUIRE(leg.index.kind == IndexKind::Finite);
    CHECK(leg.index.value == 0);

    // Integer weight exponents: every rung below the index is a pure power,
    // the final one is logarithmic on both criteria.
    const IndexResult j33 = index_of(catalog::jacobi(3, 3), Side::Right);
    REQUIRE(j33.index.kind == IndexKind::Finite);
    CHECK(j33.index.value == 3);
    CHECK(j33.faults.empty());
}

TEST_CASE("index ladder saturates at an essentially singular endpoint") {
    // exp(2 mu / x) beats every power: no pairing rung ever converges and
    // every principal ratio vanishes.
    const IndexResult r = index_of(catalog::mie(1.0), Side::Left);
    REQUIRE(r.index.kind == IndexKind::InfiniteAtDepth);
    CHECK(r.index.depth == 8);
    CHECK(r.faults.empty());
}

TEST_CASE("regularization index is independent of the spectral anchor") {
    const catalog::CatalogEntry e = catalog::bessel(0, 0, 1.5);

    ClassifyConfig at0;
    const EndpointReport r0 = endpoint_report(e, Side::Left, at0);
    REQUIRE(r0.trace_class == TraceClass::Holds);
    REQUIRE(r0.index.kind == IndexKind::Finite);
    CHECK(r0.index.value == 1);

    // Re-anchor away from the closed forms: the pair is rebuilt numerically
    // and the classification must not move.
    ClassifyConfig at1;
    at1.lambda_anchor = 1.0;
    const EndpointReport r1 = endpoint_report(e, Side::Left, at1);
    REQUIRE(r1.trace_class == TraceClass::Holds);
    REQUIRE(r1.index.kind == IndexKind::Finite);
    CHECK(r1.index.value == r0.index.value);
}

TEST_CASE("square-integrability profile of the ladder") {
    const catalog::CatalogEntry e = catalog::bessel(0, 0, 2.7);
    const EndpointReport rep = endpoint_report(e, Side::Left);
    REQUIRE(rep.index.kind == IndexKind::Finite);
    REQUIRE(rep.index.value == 2);
    REQUIRE(rep.l2_profile.size() >= 3);

    // theta_0 ~ x^{-2.2} is not square-integrable, theta_1 ~ x^{-0.2} is;
    // once gained, membership is never lost again.
    CHECK_FALSE(rep.l2_profile[0].in_l2);
    CHECK(rep.l2_profile[1].in_l2);
    bool seen = false;
    for (const auto& row : rep.l2_profile) {
        if (seen) CHECK(row.in_l2);
        seen = seen || row.in_l2;
    }
    // The ladder top used by the index is square-integrable.
    CHECK(rep.l2_profile[rep.index.value].in_l2);
    CHECK(rep.faults.empty());
}

TEST_CASE("perturbation stability of the index") {
    const catalog::CatalogEntry e = catalog::bessel(0, 0, 1.5);
    const SolutionHints* h = e.hints_left ? &*e.hints_left : nullptr;

    // u v ~ x, so a 1/x potential keeps |u v q0| integrable: the index must
    // survive the perturbation.
    {
        const Coefficient q0 = Coefficient::from_expression(Expression::parse("x^(-1)"));
        const PerturbationResult r =
            perturbation_stability(e.problem, q0, Side::Left, e.anchor_left, {}, h);
        CHECK(r.condition_holds);
        REQUIRE(r.base_index.kind == IndexKind::Finite);
        CHECK(r.base_index.value == 1);
        REQUIRE(r.perturbed_index.kind == IndexKind::Finite);
        CHECK(r.perturbed_index.value == 1);
        CHECK(r.index_preserved);
    }
    // A bounded perturbation (here q0 = r) is a spectral shift in disguise.
    {
        const Coefficient q0 = Coefficient::constant(1.0);
        const PerturbationResult r =
            perturbation_stability(e.problem, q0, Side::Left, e.anchor_left, {}, h);
        CHECK(r.condition_holds);
        CHECK(r.index_preserved);
    }
    // 1/x^2 reaches the indicial exponents themselves: |u v q0| ~ 1/x is not
    // integrable and no preservation claim is made.
    {
        const Coefficient q0 = Coefficient::from_expression(Expression::parse("x^(-2)"));
        const PerturbationResult r =
            perturbation_stability(e.problem, q0, Side::Left, e.anchor_left, {}, h);
        CHECK_FALSE(r.condition_holds);
        CHECK_FALSE(r.index_preserved);
        REQUIRE(r.base_index.kind == IndexKind::Finite);
        CHECK(r.base_index.value == 1);
    }
}

TEST_CASE("equivalence crosscheck at two spectral points") {
    // Trace-class endpoint: all four formulations pass...
    const catalog::CatalogEntry b = catalog::bessel(0, 0, 1.5);
    const SolutionHints* bh = b.hints_left ? &*b.hints_left : nullptr;
    EndpointSeries bs = series_for(b, Side::Left);
    const TfaeReport hold =
        tfae_crosscheck(b.problem, Side::Left, b.anchor_left, 0.0, 1.0, {}, bh, &bs);
    for (const auto& it : hold.items) {
        INFO(it.name << ": " << it.detail);
        CHECK(it.pass == Tri::Yes);
    }
    CHECK(hold.overall == TraceClass::Holds);

    // ... and at equal spectral points the crosscheck is trivially satisfied.
    const TfaeReport same =
        tfae_crosscheck(b.problem, Side::Left, b.anchor_left, 0.0, 0.0, {}, bh, &bs);
    CHECK(same.overall == TraceClass::Holds);

    // Non-trace-class endpoint, probed below the spectrum: u_z ~ x^z and
    // v_z ~ e^x x^{-a-1-z} make every formulation fail.
    const catalog::CatalogEntry l = catalog::laguerre(2.5);
    const SolutionHints* lh = l.hints_right ? &*l.hints_right : nullptr;
    const TfaeReport fail =
        tfae_crosscheck(l.problem, Side::Right, l.anchor_right, -2.0, -1.0, {}, lh, nullptr);
    for (const auto& it : fail.items) {
        INFO(it.name << ": " << it.detail);
        CHECK(it.pass == Tri::No);
    }
    CHECK(fail.overall == TraceClass::Fails);
}

TEST_CASE("full endpoint reports are internally coherent") {
    // Finite-index endpoint: everything decisive, no faults.
    {
        const EndpointReport rep = endpoint_report(catalog::bessel(0, 0, 2.7), Side::Left);
        CHECK(rep.nonoscillatory == Tri::Yes);
        CHECK(rep.lc_lp == LcLp::LimitPoint);
        CHECK(rep.trace_class == TraceClass::Holds);
        REQUIRE(rep.index.kind == IndexKind::Finite);
        CHECK(rep.index.value == 2);
        CHECK(rep.faults.empty());
    }
    // Failed trace-class property: the index is not merely unknown, it does
    // not exist.
    {
        const EndpointReport rep = endpoint_report(catalog::laguerre(2.5), Side::Right);
        CHECK(rep.nonoscillatory == Tri::Yes);
        CHECK(rep.lc_lp == LcLp::LimitPoint);
        CHECK(rep.trace_class == TraceClass::Fails);
        CHECK(rep.index.kind == IndexKind::Undefined);
        CHECK(rep.faults.empty());
    }
    // Limit circle holds exactly at index zero, across the catalog.
    {
        const std::vector<std::pair<catalog::CatalogEntry, Side>> sweep = {
            {catalog::bessel(0, 0, 0.3), Side::Left},
            {catalog::bessel(0, 0, 1.5), Side::Left},
            {catalog::jacobi(2.5, -0.5), Side::Left},
            {catalog::jacobi(2.5, -0.5), Side::Right},
            {catalog::power_endpoint(3, 2), Side::Left},
        };
        for (const auto& [entry, side] : sweep) {
            INFO(entry.name << (side == Side::Left ? " left" : " right"));
            const EndpointReport rep = endpoint_report(entry, side);
            REQUIRE(rep.trace_class == TraceClass::Holds);
            REQUIRE(rep.index.kind == IndexKind::Finite);
            CHECK((rep.lc_lp == LcLp::LimitCircle) == (rep.index.value == 0));
            CHECK(rep.faults.empty());
        }
    }
}
