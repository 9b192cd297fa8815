#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "slreg/limits.hpp"

using slreg::classify_limit;
using slreg::LimitClass;
using slreg::LogValue;

namespace {

std::vector<LogValue> make_seq(int n, const std::function<double(int)>& f) {
    std::vector<LogValue> s;
    for (int i = 0; i < n; ++i) s.push_back(LogValue::from_double(f(i)));
    return s;
}

} // namespace

TEST_CASE("Power-law decay classifies as a zero limit with the right rate") {
    std::vector<LogValue> s;
    for (int i = 0; i < 30; ++i) s.push_back(LogValue::from_log(1, -0.8 * i));
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Zero);
    REQUIRE(r.rate == Catch::Approx(0.8 / std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("Power-law growth classifies as infinite") {
    std::vector<LogValue> s;
    for (int i = 0; i < 30; ++i) s.push_back(LogValue::from_log(-1, 1.3 * i));
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Infinite);
    REQUIRE(r.rate == Catch::Approx(1.3 / std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("Geometric convergence to a nonzero constant is accelerated exactly") {
    const auto s = make_seq(25, [](int i) { return 2.0 + 3.0 * std::pow(0.5, i); });
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Finite);
    REQUIRE(r.value == Catch::Approx(2.0).epsilon(1e-10));

    const auto neg = make_seq(25, [](int i) { return -0.7 - 0.2 * std::pow(0.6, i); });
    const auto rn = classify_limit(neg, 0.5);
    REQUIRE(rn.cls == LimitClass::Finite);
    REQUIRE(rn.value == Catch::Approx(-0.7).epsilon(1e-8));
}

TEST_CASE("Reciprocal-affine decay (borderline log case) goes to zero") {
    // g(x_i) ~ 1/(A + B i): log-magnitude slope vanishes, yet the limit is 0.
    const auto s = make_seq(40, [](int i) { return 1.0 / (3.0 + 0.7 * i); });
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Zero);
    REQUIRE(r.model == "reciprocal-affine");
}

TEST_CASE("Affine growth (borderline log case) goes to infinity") {
    const auto s = make_seq(40, [](int i) { return -(2.0 + 0.5 * i); });
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Infinite);
    REQUIRE(r.model == "affine");
}

TEST_CASE("Persistent sign flips without decay are oscillatory") {
    const auto s = make_seq(30, [](int i) { return (i % 2 ? 1.0 : -1.0) * (1.0 + 0.01 * i); });
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Oscillatory);
}

TEST_CASE("Sign flips with strong decay still count as a zero limit") {
    const auto s = make_seq(30, [](int i) { return (i % 2 ? 1.0 : -1.0) * std::pow(0.3, i); });
    const auto r = classify_limit(s, 0.5);
    REQUIRE(r.cls == LimitClass::Zero);
}

TEST_CASE("Degenerate inputs are inconclusive or exactly zero") {
    REQUIRE(classify_limit({}, 0.5).cls == LimitClass::Zero); // empty = identically zero
    const auto shorty = make_seq(3, [](int) { return 1.0; });
    REQUIRE(classify_limit(shorty, 0.5).cls == LimitClass::Inconclusive);

    std::vector<LogValue> zeros(10);
    REQUIRE(classify_limit(zeros, 0.5).cls == LimitClass::Zero);

    auto trailing = make_seq(20, [](int i) { return i < 12 ? 1.0 : 0.0; });
    REQUIRE(classify_limit(trailing, 0.5).cls == LimitClass::Inconclusive);
}

TEST_CASE("Aitken acceleration collapses geometric error terms") {
    std::vector<double> s;
    for (int i = 0; i < 10; ++i) s.push_back(5.0 - 2.0 * std::pow(0.4, i));
    double drift = 1.0;
    const double L = slreg::aitken_extrapolate(s, &drift);
    REQUIRE(L == Catch::Approx(5.0).epsilon(1e-12));
    REQUIRE(drift < 1e-10);
}
