#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "micropump/bessel.hpp"
#include "micropump/errors.hpp"

using namespace micropump;

TEST_CASE("series values against known points") {
    // classic table anchors
    CHECK(bessel::bessel_j(0, 0.0) == doctest::Approx(1.0));
    CHECK(bessel::bessel_j(1, 0.0) == doctest::Approx(0.0));
    CHECK(bessel::bessel_j(0, 2.404825557695773) == doctest::Approx(0.0).epsilon(0.0).scale(1e-12));
    CHECK(bessel::bessel_j(1, 1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-12));
    CHECK(bessel::bessel_i(0, 1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-12));
    CHECK(bessel::bessel_i(1, 2.0) == doctest::Approx(1.5906368546373291).epsilon(1e-12));
}

TEST_CASE("series obey the recurrence J_{n-1} + J_{n+1} = (2n/x) J_n") {
    for (double x : {0.5, 1.7, 4.2, 9.3, 14.0}) {
        for (int n : {1, 2, 3}) {
            double lhs = bessel::bessel_j(n - 1, x) + bessel::bessel_j(n + 1, x);
            double rhs = 2.0 * n / x * bessel::bessel_j(n, x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
            double lhs_i = bessel::bessel_i(n - 1, x) - bessel::bessel_i(n + 1, x);
            double rhs_i = 2.0 * n / x * bessel::bessel_i(n, x);
            CHECK(lhs_i == doctest::Approx(rhs_i).epsilon(1e-9));
        }
    }
}

TEST_CASE("clamped-plate characteristic roots") {
    // frozen oracle values for the clamped circular plate
    CHECK(bessel::clamped_plate_lambda2(0, 1) == doctest::Approx(10.2158).epsilon(5e-5));
    CHECK(bessel::clamped_plate_lambda2(1, 1) == doctest::Approx(21.2604).epsilon(5e-5));
    CHECK(bessel::clamped_plate_lambda2(2, 1) == doctest::Approx(34.877).epsilon(5e-5));
    CHECK(bessel::clamped_plate_lambda2(0, 2) == doctest::Approx(39.771).epsilon(5e-5));
    CHECK(bessel::clamped_plate_lambda2(1, 2) == doctest::Approx(60.8287).epsilon(5e-5));
    CHECK(bessel::clamped_plate_lambda2(2, 2) == doctest::Approx(84.5826).epsilon(5e-5));
    CHECK(bessel::clamped_plate_lambda2(0, 3) == doctest::Approx(89.1041).epsilon(5e-5));
}

TEST_CASE("roots actually zero the characteristic function") {
    for (int n : {0, 1, 2}) {
        for (int s : {1, 2}) {
            double lam = std::sqrt(bessel::clamped_plate_lambda2(n, s));
            double f = bessel::bessel_j(n, lam) * bessel::bessel_i(n + 1, lam) +
                       bessel::bessel_i(n, lam) * bessel::bessel_j(n + 1, lam);
            // normalize by I_n growth
            CHECK(std::fabs(f / bessel::bessel_i(n, lam)) < 1e-9);
        }
    }
}

TEST_CASE("out-of-range scan reports the interval") {
    CHECK_THROWS_AS(bessel::clamped_plate_lambda2(0, 12), NumericalError);
    try {
        bessel::clamped_plate_lambda2(0, 12);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("scanning") != std::string::npos);
    }
    CHECK_THROWS_AS(bessel::clamped_plate_lambda2(-1, 1), ValidationError);
    CHECK_THROWS_AS(bessel::clamped_plate_lambda2(0, 0), ValidationError);
}
