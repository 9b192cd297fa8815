#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "slreg/log_value.hpp"

using slreg::CLogValue;
using slreg::LogValue;

TEST_CASE("LogValue round-trips ordinary doubles") {
    for (double v : {1.0, -3.5, 1e-200, -2.75e150, 0.0}) {
        const LogValue lv = LogValue::from_double(v);
        REQUIRE(lv.to_double() == Catch::Approx(v).margin(0.0));
    }
    REQUIRE(LogValue::from_double(0.0).is_zero());
    REQUIRE_THROWS_AS(LogValue::from_double(std::nan("")), std::invalid_argument);
}

TEST_CASE("Products and quotients never overflow") {
    const LogValue a = LogValue::from_log(1, 5000.0);
    const LogValue b = LogValue::from_log(-1, 6000.0);
    const LogValue p = a * b;
    REQUIRE(p.sign == -1);
    REQUIRE(p.lg == Catch::Approx(11000.0));
    const LogValue q = a / b;
    REQUIRE(q.sign == -1);
    REQUIRE(q.lg == Catch::Approx(-1000.0));
    REQUIRE_THROWS_AS(a / LogValue::zero(), std::domain_error);
}

TEST_CASE("Addition uses the max-shift rule exactly") {
    const LogValue a = LogValue::from_log(1, 1000.0);
    const LogValue b = LogValue::from_log(1, 990.0);
    const LogValue s = a + b;
    REQUIRE(s.sign == 1);
    REQUIRE(s.lg == Catch::Approx(1000.0 + std::log1p(std::exp(-10.0))).epsilon(1e-14));

    // Exact cancellation collapses to zero.
    REQUIRE((a - a).is_zero());

    // A vastly smaller addend leaves the larger term untouched.
    const LogValue tiny = LogValue::from_log(1, -5000.0);
    REQUIRE((a + tiny).lg == Catch::Approx(1000.0));

    // Sign bookkeeping under subtraction of close magnitudes.
    const LogValue c = LogValue::from_double(3.0);
    const LogValue d = LogValue::from_double(5.0);
    REQUIRE((c - d).to_double() == Catch::Approx(-2.0));
}

TEST_CASE("Integer powers keep the sign of negative bases") {
    const LogValue m = LogValue::from_double(-2.0);
    REQUIRE(m.pow_int(3).to_double() == Catch::Approx(-8.0));
    REQUIRE(m.pow_int(4).to_double() == Catch::Approx(16.0));
    REQUIRE(m.pow_int(0).to_double() == Catch::Approx(1.0));
    REQUIRE_THROWS_AS(LogValue::zero().pow_int(0), std::domain_error);
    REQUIRE_THROWS_AS(m.pow_real(0.5), std::domain_error);
    REQUIRE(LogValue::from_double(9.0).pow_real(0.5).to_double() == Catch::Approx(3.0));
}

TEST_CASE("Relative differences stay meaningful at extreme magnitudes") {
    const LogValue a = LogValue::from_log(1, 1.0e4);
    const LogValue b = LogValue::from_log(1, 1.0e4 + 1.0e-3);
    REQUIRE(slreg::log_relative_diff(a, b) == Catch::Approx(1e-3 / (1e4 + 1e-3)).epsilon(1e-6));
    const LogValue u = LogValue::from_double(2.0);
    const LogValue v = LogValue::from_double(2.0000002);
    REQUIRE(slreg::rel_diff(u, v) == Catch::Approx(1e-7).epsilon(1e-2));
}

TEST_CASE("Magnitude ordering treats zero as smallest") {
    REQUIRE(LogValue::mag_less(LogValue::zero(), LogValue::from_double(1e-300)));
    REQUIRE(!LogValue::mag_less(LogValue::from_double(1e-300), LogValue::zero()));
    REQUIRE(LogValue::mag_less(LogValue::from_double(-2.0), LogValue::from_double(3.0)));
}

TEST_CASE("Complex log-scaled values track phase and magnitude") {
    const CLogValue a = CLogValue::from_complex({3.0, 4.0});
    REQUIRE(std::abs(a.to_complex() - std::complex<double>(3.0, 4.0)) < 1e-12);

    // Product of two enormously scaled values: magnitudes add, phases rotate.
    CLogValue big({1.0, 1.0}, 800.0);
    CLogValue big2({0.0, 1.0}, 700.0);
    const CLogValue p = big * big2;
    REQUIRE(p.log_mag() == Catch::Approx(1500.0 + 0.5 * std::log(2.0)).epsilon(1e-12));
    const std::complex<double> dir = p.to_complex_shifted(p.log_mag());
    // (1+i) * i = -1 + i: argument 3*pi/4.
    REQUIRE(std::arg(dir) == Catch::Approx(3.0 * std::acos(-1.0) / 4.0).epsilon(1e-12));

    // Addition with a shared shift reproduces plain complex addition.
    const CLogValue s = a + CLogValue::from_complex({-1.0, 2.0});
    REQUIRE(std::abs(s.to_complex() - std::complex<double>(2.0, 6.0)) < 1e-12);
    REQUIRE_THROWS_AS(a / CLogValue(), std::domain_error);
}
