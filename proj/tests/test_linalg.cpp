#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "micropump/errors.hpp"
#include "micropump/linalg.hpp"

using namespace micropump;
using linalg::Matrix;

namespace {

Matrix random_spd(std::size_t n, std::mt19937& rng, double shift) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = dist(rng);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += b(k, i) * b(k, j);
            a(i, j) = s + (i == j ? shift : 0.0);
        }
    return a;
}

Matrix random_sym(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = dist(rng);
    return a;
}

} // namespace

TEST_CASE("2x2 analytic eigenvalues") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 1) = 2.0;
    auto res = linalg::eigen_symmetric(a);
    CHECK(res.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("diagonal matrix returns sorted entries") {
    Matrix a(4, 4);
    const double d[4] = {3.0, -1.0, 2.5, 0.0};
    for (int i = 0; i < 4; ++i) a(i, i) = d[i];
    auto res = linalg::eigen_symmetric(a);
    CHECK(res.values[0] == doctest::Approx(-1.0));
    CHECK(res.values[1] == doctest::Approx(0.0));
    CHECK(res.values[2] == doctest::Approx(2.5));
    CHECK(res.values[3] == doctest::Approx(3.0));
}

TEST_CASE("symmetric eigensolve residuals and orthonormality") {
    std::mt19937 rng(42);
    for (std::size_t n : {3ul, 7ul, 25ul, 60ul}) {
        Matrix a = random_sym(n, rng);
        auto res = linalg::eigen_symmetric(a);
        double scale = 0.0;
        for (double v : res.values) scale = std::max(scale, std::fabs(v));
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                double ax = 0.0;
                for (std::size_t j = 0; j < n; ++j) ax += a(i, j) * res.vectors(j, k);
                CHECK(std::fabs(ax - res.values[k] * res.vectors(i, k)) < 1e-10 * std::max(1.0, scale));
            }
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += res.vectors(i, k) * res.vectors(i, l);
                CHECK(std::fabs(dot - (k == l ? 1.0 : 0.0)) < 1e-10);
            }
    }
}

TEST_CASE("cholesky rejects indefinite matrices naming the pivot") {
    Matrix a(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = -2.0;
    a(2, 2) = 1.0;
    CHECK_THROWS_AS(linalg::cholesky(a), NumericalError);
    try {
        linalg::cholesky(a);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }
}

TEST_CASE("generalized problem: K x = lambda M x residuals and M-orthonormality") {
    std::mt19937 rng(7);
    for (std::size_t n : {4ul, 12ul, 40ul}) {
        Matrix k = random_spd(n, rng, 0.5);
        Matrix m = random_spd(n, rng, static_cast<double>(n)); // well conditioned mass
        auto res = linalg::eigen_symmetric_generalized(k, m);
        for (std::size_t c = 0; c < n; ++c) {
            CHECK(res.values[c] > 0.0);
            if (c > 0) CHECK(res.values[c] >= res.values[c - 1]);
            double xmx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double mi = 0.0, ki = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    mi += m(i, j) * res.vectors(j, c);
                    ki += k(i, j) * res.vectors(j, c);
                }
                xmx += res.vectors(i, c) * mi;
                CHECK(std::fabs(ki - res.values[c] * mi) < 1e-8 * (1.0 + res.values[c]));
            }
            CHECK(xmx == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("generalized reduction matches scalar problem") {
    // K = diag(4), M = diag(2) -> lambda = 2, x = 1/sqrt(2)
    Matrix k(1, 1), m(1, 1);
    k(0, 0) = 4.0;
    m(0, 0) = 2.0;
    auto res = linalg::eigen_symmetric_generalized(k, m);
    CHECK(res.values[0] == doctest::Approx(2.0));
    CHECK(std::fabs(res.vectors(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
}
