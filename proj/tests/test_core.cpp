#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pvarlab/core.hpp"

using namespace pvarlab;

TEST_CASE("metric") {
    CHECK(metric(3.0, 3.0) == 0.0);
    CHECK(metric(0.0, 1.5) == 1.5);
    CHECK(metric(-2.0, 1.0) == 3.0);
    CHECK(metric(1.0, -2.0) == 3.0);
}

TEST_CASE("dyadic_size examples and exactness") {
    CHECK(dyadic_size(0) == 0.5);
    CHECK(dyadic_size(-1) == 1.0);
    CHECK(dyadic_size(3) == 0.0625);
    CHECK(dyadic_size(60) == std::ldexp(1.0, -61));
    CHECK(dyadic_size(-60) == std::ldexp(1.0, 59));
    for (int r = -59; r <= 59; ++r)
        CHECK(dyadic_size(r) / dyadic_size(r + 1) == 2.0);
    CHECK_THROWS_AS(dyadic_size(61), std::domain_error);
    CHECK_THROWS_AS(dyadic_size(-61), std::domain_error);
    CHECK(DyadicLevel{2}.size() == 0.125);
}

TEST_CASE("cutoff_level examples") {
    CHECK(cutoff_level(1.0) == -3);
    CHECK(cutoff_level(0.25) == -1);
    CHECK(cutoff_level(0.3) == -2);
    CHECK_THROWS_AS(cutoff_level(0.0), std::domain_error);
    CHECK_THROWS_AS(cutoff_level(-1.0), std::domain_error);
}

TEST_CASE("cutoff_level double inequality") {
    const double grid[] = {1e-6, 0.01, 0.125, 0.25, 0.3,  0.5,  0.7,
                           1.0,  1.5,  2.0,   4.0,  10.0, 12.7, 1e6};
    for (double a0 : grid) {
        const int r1 = cutoff_level(a0);
        const double target = -(std::log2(a0) + 3.0);
        CHECK(r1 <= target);
        CHECK(target < r1 + 1);
        // every level at or below the cutoff has M_{r+2} >= a0
        for (int r = r1 - 5; r <= r1; ++r)
            if (r + 2 >= -60 && r + 2 <= 60)
                CHECK(dyadic_size(r + 2) >= a0);
    }
}

TEST_CASE("SamplePath validation") {
    SamplePath good;
    good.times = {0.0, 0.5, 1.0};
    good.values = {0.0, 1.0, -1.0};
    good.horizon = 1.0;
    CHECK_NOTHROW(good.validate());

    SamplePath single;
    single.times = {0.0};
    single.values = {2.0};
    single.horizon = 0.0;
    CHECK_NOTHROW(single.validate());

    SamplePath bad = good;
    bad.times = {0.1, 0.5, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = good;
    bad.times = {0.0, 0.5, 0.5};
    bad.horizon = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = good;
    bad.horizon = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = good;
    bad.values[1] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = good;
    bad.values.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(SamplePath{}.validate(), std::invalid_argument);
}

TEST_CASE("TailEnvelope") {
    TailEnvelope env{2.0, 2.0, 4.0, 1.0};
    CHECK_NOTHROW(env.validate());
    CHECK(env.critical_exponent() == 2.0);
    CHECK(env.value(0.5, 0.5) == doctest::Approx(2.0 * 0.25 / std::pow(0.5, 4.0)));
    // a above a0 is clamped
    CHECK(env.value(0.5, 3.0) == doctest::Approx(env.value(0.5, 1.0)));

    CHECK_THROWS_AS((TailEnvelope{0.0, 1.0, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TailEnvelope{1.0, 0.5, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TailEnvelope{1.0, 1.0, 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TailEnvelope{1.0, 1.0, 1.0, 0.0}.validate()), std::invalid_argument);
}
