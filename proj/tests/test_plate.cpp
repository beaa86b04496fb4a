#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "micropump/bessel.hpp"
#include "micropump/errors.hpp"
#include "micropump/materials.hpp"
#include "micropump/plate.hpp"

using namespace micropump;
using plate::Mode;
using plate::PlateModel;

namespace {

constexpr double kPi = std::numbers::pi;

PlateModel homogeneous_plate(double D = 2.0, double rho_h = 1.5, double a = 0.01) {
    PlateModel m;
    m.radius = a;
    m.constants.bending_stiffness_D = D;
    m.constants.areal_mass = rho_h;
    m.constants.neutral_axis_z = 0.0;
    m.constants.piezo_moment_per_volt = -4.658e-3;
    m.constants.effective_e31 = -16.1;
    m.damping_zeta = 0.0;
    return m;
}

PlateModel composite_plate() {
    auto mat = materials::builtin_materials();
    PlateModel m;
    m.radius = 3000e-6;
    m.constants = materials::laminate_reduce(mat.stack(), materials::MaterialSet::drive_index);
    m.damping_zeta = 0.02;
    return m;
}

double analytic_omega(const PlateModel& m, int n, int s) {
    const double lam2 = bessel::clamped_plate_lambda2(n, s);
    return lam2 / (m.radius * m.radius) *
           std::sqrt(m.constants.bending_stiffness_D / m.constants.areal_mass);
}

// radial Simpson quadrature of R_j R_k r dr with the modes' own interpolant
double radial_mass_integral(const Mode& mj, const Mode& mk, double rho_h, int samples = 4096) {
    const double a = mj.radius;
    const double h = a / samples;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        double r0 = i * h, r1 = r0 + h, rm = r0 + 0.5 * h;
        auto f = [&](double r) {
            return rho_h * mj.radial_value(r) * mk.radial_value(r) * r;
        };
        acc += h / 6.0 * (f(r0) + 4.0 * f(rm) + f(r1));
    }
    return acc;
}

} // namespace

TEST_CASE("eigenfrequencies match the characteristic-root oracle, n = 0,1,2") {
    PlateModel m = homogeneous_plate();
    for (int n : {0, 1, 2}) {
        auto modes = plate::radial_eigensolve(m, n, 2, 128);
        for (int s = 1; s <= 2; ++s) {
            const double exact = analytic_omega(m, n, s);
            const double fem = modes[static_cast<std::size_t>(s - 1)].omega;
            CHECK(std::fabs(fem / exact - 1.0) < 5e-3); // 0.5 %
        }
    }
}

TEST_CASE("frequency ratio (1,1)/(0,1) equals the oracle ratio") {
    PlateModel m = homogeneous_plate(3.3, 0.9, 0.004);
    auto m0 = plate::radial_eigensolve(m, 0, 1, 128);
    auto m1 = plate::radial_eigensolve(m, 1, 1, 128);
    CHECK(m1[0].omega / m0[0].omega == doctest::Approx(21.2604 / 10.2158).epsilon(5e-3));
}

TEST_CASE("h^4-type convergence toward the oracle (order >= 3.5)") {
    PlateModel m = homogeneous_plate();
    const double exact = analytic_omega(m, 0, 1);
    double err[3];
    const int elems[3] = {32, 64, 128};
    for (int i = 0; i < 3; ++i) {
        auto modes = plate::radial_eigensolve(m, 0, 1, elems[i]);
        err[i] = std::fabs(modes[0].omega - exact) / exact;
    }
    const double order1 = std::log2(err[0] / err[1]);
    const double order2 = std::log2(err[1] / err[2]);
    INFO("errors ", err[0], " ", err[1], " ", err[2], " orders ", order1, " ", order2);
    CHECK(order1 >= 3.5);
    CHECK(order2 >= 3.5);
}

TEST_CASE("eigenvalues monotone non-increasing under nested refinement") {
    PlateModel m = homogeneous_plate();
    for (int n : {0, 1, 2}) {
        double prev = 1e300;
        for (int elems : {16, 32, 64, 128}) {
            auto modes = plate::radial_eigensolve(m, n, 1, elems);
            CHECK(modes[0].omega <= prev * (1.0 + 1e-12));
            prev = modes[0].omega;
        }
    }
}

TEST_CASE("mass orthonormality within 1e-8") {
    PlateModel m = composite_plate();
    const double rho_h = m.constants.areal_mass;
    for (int n : {0, 1, 2}) {
        auto modes = plate::radial_eigensolve(m, n, 3, 128);
        const double cn = (n == 0) ? 2.0 * kPi : kPi;
        for (std::size_t j = 0; j < modes.size(); ++j) {
            for (std::size_t k = j; k < modes.size(); ++k) {
                const double integral = cn * radial_mass_integral(modes[j], modes[k], rho_h);
                CHECK(std::fabs(integral - (j == k ? 1.0 : 0.0)) < 1e-8);
            }
        }
        for (const auto& mode : modes) CHECK(mode.norm_residual < 1e-8);
    }
}

TEST_CASE("clamped edge: R(a) = R'(a) = 0 and frequencies scale as 1/a^2") {
    PlateModel m = composite_plate();
    auto modes = plate::radial_eigensolve(m, 0, 2, 96);
    for (const auto& mode : modes) {
        CHECK(mode.node_value.back() == 0.0);
        CHECK(mode.node_slope.back() == 0.0);
        CHECK(mode.radial_value(mode.radius * 0.9999999) ==
              doctest::Approx(0.0).scale(std::fabs(mode.node_value.front()) + 1e-30).epsilon(1e-4));
    }

    PlateModel m2 = m;
    m2.radius = 2.0 * m.radius;
    auto modes2 = plate::radial_eigensolve(m2, 0, 2, 96);
    for (std::size_t k = 0; k < modes.size(); ++k)
        CHECK(modes2[k].omega / modes[k].omega == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("composite plate f1: analytic CLT value near 2.46e5 Hz") {
    PlateModel m = composite_plate();
    auto modes = plate::radial_eigensolve(m, 0, 1, 128);
    const double f_fem = modes[0].omega / (2.0 * kPi);
    const double f_analytic = analytic_omega(m, 0, 1) / (2.0 * kPi);
    CHECK(f_analytic == doctest::Approx(2.4567e5).epsilon(2e-3));
    CHECK(f_fem == doctest::Approx(f_analytic).epsilon(5e-3));
}

TEST_CASE("piezo modal force: zero cases and quadrature self-convergence") {
    PlateModel m = composite_plate();
    auto n0 = plate::radial_eigensolve(m, 0, 2, 128);
    auto n1 = plate::radial_eigensolve(m, 1, 2, 128);

    // any n >= 1 mode -> exactly zero
    for (const auto& mode : n1) {
        CHECK(plate::piezo_force_per_volt(m, mode) == 0.0);
        CHECK(plate::piezo_force_per_volt_area(m, mode, 4) == 0.0);
    }
    // V = 0 -> zero force (linearity in V by construction)
    const double c = plate::piezo_force_per_volt(m, n0[0]);
    CHECK(c * 0.0 == 0.0);
    CHECK(c != 0.0);
    CHECK(2.0 * c == doctest::Approx(c * 2.0)); // moment at 2V is twice moment at V

    // boundary-parts route vs 4x-refined area quadrature within 0.1 %
    for (const auto& mode : n0) {
        const double parts = plate::piezo_force_per_volt(m, mode);
        const double area4 = plate::piezo_force_per_volt_area(m, mode, 4);
        CHECK(std::fabs(parts - area4) <= 1e-3 * std::fabs(parts));
    }
}

TEST_CASE("newmark: rest state stays at rest") {
    PlateModel m = composite_plate();
    auto modes = plate::radial_eigensolve(m, 0, 2, 64);
    plate::ModalState st(modes.size());
    std::vector<double> f(modes.size(), 0.0);
    for (int i = 0; i < 100; ++i) plate::modal_step(st, modes, f, 1e-6);
    for (double q : st.q) CHECK(q == 0.0);
    for (double v : st.qdot) CHECK(v == 0.0);
}

TEST_CASE("newmark: undamped free vibration conserves energy to 1e-10/step") {
    PlateModel m = homogeneous_plate();
    m.damping_zeta = 0.0;
    auto modes = plate::radial_eigensolve(m, 0, 1, 64);
    plate::ModalState st(1);
    st.q[0] = 1.0;
    const double om = modes[0].omega;
    const double dt = 0.05 / om;
    const double e0 = 0.5 * om * om;
    std::vector<double> f{0.0};
    const int steps = 2000;
    for (int i = 0; i < steps; ++i) plate::modal_step(st, modes, f, dt);
    const double e1 = 0.5 * (st.qdot[0] * st.qdot[0] + om * om * st.q[0] * st.q[0]);
    CHECK(std::fabs(e1 - e0) / e0 < 1e-10 * steps);
}

TEST_CASE("newmark: forced response matches the SDOF magnitude within 1%") {
    PlateModel m = homogeneous_plate();
    m.damping_zeta = 0.05;
    auto modes = plate::radial_eigensolve(m, 0, 1, 64);
    Mode& mode = modes[0];
    const double om = mode.omega, ze = mode.zeta;
    const double Om = 0.8 * om;
    const double F = 3.7;
    const double T = 2.0 * kPi / Om;
    const double dt = T / 600.0;
    plate::ModalState st(1);
    std::vector<double> f{0.0};
    const int cycles = 50, spc = 600;
    double amp = 0.0;
    for (int i = 1; i <= cycles * spc; ++i) {
        const double t1 = i * dt;
        f[0] = F * std::sin(Om * t1);
        plate::modal_step(st, modes, f, dt);
        if (i > (cycles - 2) * spc) amp = std::max(amp, std::fabs(st.q[0]));
    }
    const double denom = std::hypot(om * om - Om * Om, 2.0 * ze * om * Om);
    CHECK(amp == doctest::Approx(F / denom).epsilon(0.01));
}

TEST_CASE("deflection: basis reproduction and Parseval identity") {
    PlateModel m = composite_plate();
    std::vector<Mode> modes;
    for (int n : {0, 1, 2}) {
        auto part = plate::radial_eigensolve(m, n, 3, 96);
        for (auto& mo : part) modes.push_back(std::move(mo));
    }

    std::vector<double> q(modes.size(), 0.0);
    CHECK(plate::deflection_at(modes, q, 0.4 * m.radius, 1.0) == 0.0);

    q[1] = 1.0; // single mode reproduces its own shape
    for (double r : {0.0, 0.3 * m.radius, 0.7 * m.radius}) {
        for (double th : {0.0, 0.5, 2.0}) {
            CHECK(plate::deflection_at(modes, q, r, th) == doctest::Approx(modes[1].shape(r, th)));
        }
    }
    CHECK(plate::deflection_at(modes, q, m.radius * 1.0001, 0.3) == 0.0);

    // Parseval: int rho h W^2 dA = sum q_k^2 under mass orthonormality
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double sum_q2 = 0.0;
    for (auto& val : q) {
        val = dist(rng);
        sum_q2 += val * val;
    }
    const int nr = 600, nth = 256;
    const double rho_h = m.constants.areal_mass;
    double integral = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = (i + 0.5) * m.radius / nr;
        for (int j = 0; j < nth; ++j) {
            const double th = (j + 0.5) * 2.0 * kPi / nth;
            const double w = plate::deflection_at(modes, q, r, th);
            integral += rho_h * w * w * r * (m.radius / nr) * (2.0 * kPi / nth);
        }
    }
    CHECK(integral == doctest::Approx(sum_q2).epsilon(1e-6));
}

TEST_CASE("coupled-frequency estimate is far below the dry frequency") {
    PlateModel m = composite_plate();
    auto modes = plate::radial_eigensolve(m, 0, 1, 128);
    const double f_dry = modes[0].omega / (2.0 * kPi);
    const double f_wet = plate::coupled_frequency_estimate(modes[0], 1000.0, 80e-6, 1093e-6, 522e-6);
    CHECK(f_wet > 0.0);
    CHECK(f_wet < 0.25 * f_dry);
}

TEST_CASE("input validation") {
    PlateModel m = homogeneous_plate();
    CHECK_THROWS_AS(plate::radial_eigensolve(m, -1, 1, 64), ValidationError);
    CHECK_THROWS_AS(plate::radial_eigensolve(m, 0, 1, 4), ValidationError);
    CHECK_THROWS_AS(plate::radial_eigensolve(m, 0, 99, 16), ValidationError);
    m.radius = -1.0;
    CHECK_THROWS_AS(plate::radial_eigensolve(m, 0, 1, 64), ValidationError);
}
