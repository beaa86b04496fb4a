#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "micropump/errors.hpp"
#include "micropump/materials.hpp"

using namespace micropump;
using namespace micropump::materials;

namespace {

// independent closed-form route used as the oracle for the library path
struct IsoOracle {
    double E, nu, Eprime;
};
IsoOracle iso_oracle(double c11, double c12) {
    IsoOracle o;
    o.E = (c11 - c12) * (c11 + 2.0 * c12) / (c11 + c12);
    o.nu = c12 / (c11 + c12);
    o.Eprime = o.E / (1.0 - o.nu * o.nu);
    return o;
}

} // namespace

TEST_CASE("builtin tensors are symmetric and positive definite") {
    MaterialSet mat = builtin_materials();
    CHECK_NOTHROW(mat.substrate.validate("glass"));
    CHECK_NOTHROW(mat.piezo.validate("pzt"));
    CHECK(mat.substrate.elastic.smallest_eigenvalue() > 0.0);
    CHECK(mat.piezo.elastic.smallest_eigenvalue() > 0.0);
}

TEST_CASE("isotropic equivalents: glass and PZT hand values") {
    MaterialSet mat = builtin_materials();
    auto g = isotropic_equivalents(mat.substrate.elastic);
    auto og = iso_oracle(1.65e11, 0.63e11);
    CHECK(g.youngs_modulus == doctest::Approx(og.E).epsilon(1e-14));
    CHECK(g.youngs_modulus == doctest::Approx(1.3018e11).epsilon(1e-4));
    CHECK(g.poisson_ratio == doctest::Approx(0.27632).epsilon(1e-4));

    auto p = isotropic_equivalents(mat.piezo.elastic);
    auto op = iso_oracle(1.21e11, 7.54e10);
    CHECK(p.youngs_modulus == doctest::Approx(op.E).epsilon(1e-14));
    CHECK(p.youngs_modulus == doctest::Approx(6.3106e10).epsilon(1e-4));
    CHECK(p.poisson_ratio == doctest::Approx(0.38391).epsilon(1e-4));
}

TEST_CASE("isotropic equivalents: decoupled axes") {
    ElasticTensor t;
    for (int i = 0; i < 6; ++i) t.c[i][i] = 5e10;
    auto iso = isotropic_equivalents(t);
    CHECK(iso.youngs_modulus == doctest::Approx(5e10));
    CHECK(iso.poisson_ratio == doctest::Approx(0.0));
}

TEST_CASE("non positive definite tensor is rejected, names the eigenvalue") {
    ElasticTensor t;
    for (int i = 0; i < 6; ++i) t.c[i][i] = 1e10;
    t.c[0][1] = t.c[1][0] = 2e10; // breaks PD
    CHECK_THROWS_AS(isotropic_equivalents(t), ValidationError);
    try {
        isotropic_equivalents(t);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
    }
}

TEST_CASE("effective e31 plane-stress condensation") {
    MaterialSet mat = builtin_materials();
    const double expected = -5.4 - 15.8 * 7.52e10 / 1.11e11; // = -16.1041...
    CHECK(effective_e31(mat.piezo) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(effective_e31(mat.piezo) == doctest::Approx(-16.105).epsilon(1e-4));

    Layer l = mat.piezo;
    l.piezo->e[2][2] = 0.0; // e33 = 0 -> e31 unchanged
    CHECK(effective_e31(l) == doctest::Approx(-5.4));
    l.piezo->e[2][0] = 0.0;
    CHECK(effective_e31(l) == doctest::Approx(0.0));

    Layer no_piezo = mat.substrate;
    CHECK_THROWS_AS(effective_e31(no_piezo), ValidationError);
}

TEST_CASE("piezo tensor pattern validation") {
    MaterialSet mat = builtin_materials();
    PiezoTensor p = *mat.piezo.piezo;
    CHECK_NOTHROW(p.validate("pzt"));
    p.e[0][0] = 1.0; // normal coupling in a shear row
    CHECK_THROWS_AS(p.validate("pzt"), ValidationError);
}

TEST_CASE("laminate reduction: single glass layer") {
    MaterialSet mat = builtin_materials();
    Layer glass = mat.substrate;
    Layer drive = mat.piezo; // only to satisfy the drive-layer requirement
    drive.thickness = 1e-12; // vanishing drive layer -> glass-only constants
    auto lc1 = laminate_reduce({glass, drive}, 1);

    auto o = iso_oracle(1.65e11, 0.63e11);
    const double t = 500e-6;
    CHECK(lc1.neutral_axis_z == doctest::Approx(0.5 * t).epsilon(1e-6));
    CHECK(lc1.bending_stiffness_D == doctest::Approx(o.Eprime * t * t * t / 12.0).epsilon(1e-6));
    CHECK(lc1.bending_stiffness_D == doctest::Approx(1.468).epsilon(5e-3));
    CHECK(lc1.areal_mass == doctest::Approx(1.165).epsilon(1e-6));
}

TEST_CASE("laminate reduction: Tables 2-3 two-layer stack") {
    MaterialSet mat = builtin_materials();
    auto lc = laminate_reduce(mat.stack(), MaterialSet::drive_index);

    // independent CLT evaluation
    auto og = iso_oracle(1.65e11, 0.63e11);
    auto op = iso_oracle(1.21e11, 7.54e10);
    const double tg = 500e-6, tp = 200e-6;
    const double zbar = (og.Eprime * tg * 0.5 * tg + op.Eprime * tp * (tg + 0.5 * tp)) /
                        (og.Eprime * tg + op.Eprime * tp);
    auto third = [](double zb, double zt) { return (zt * zt * zt - zb * zb * zb) / 3.0; };
    const double d = og.Eprime * third(-zbar, tg - zbar) + op.Eprime * third(tg - zbar, tg + tp - zbar);
    const double e31b = -5.4 - 15.8 * 7.52e10 / 1.11e11;
    const double mpv = e31b * (tg + 0.5 * tp - zbar);

    CHECK(lc.neutral_axis_z == doctest::Approx(zbar).epsilon(1e-14));
    CHECK(lc.bending_stiffness_D == doctest::Approx(d).epsilon(1e-14));
    CHECK(lc.areal_mass == doctest::Approx(2330.0 * (tg + tp)).epsilon(1e-14));
    CHECK(lc.piezo_moment_per_volt == doctest::Approx(mpv).epsilon(1e-14));

    // spec anchors
    CHECK(lc.neutral_axis_z == doctest::Approx(310.8e-6).epsilon(2e-4));
    CHECK(lc.bending_stiffness_D == doctest::Approx(3.02).epsilon(2e-3));
    CHECK(lc.areal_mass == doctest::Approx(1.631).epsilon(1e-9));
    CHECK(lc.piezo_moment_per_volt == doctest::Approx(-4.66e-3).epsilon(1e-3));
}

TEST_CASE("thin drive layer converges to the single-layer constants") {
    MaterialSet mat = builtin_materials();
    Layer glass = mat.substrate;
    Layer pzt = mat.piezo;
    auto base = laminate_reduce({glass, [&] { Layer l = pzt; l.thickness = 1e-15; return l; }()}, 1);
    auto o = iso_oracle(1.65e11, 0.63e11);
    CHECK(base.bending_stiffness_D == doctest::Approx(o.Eprime * 500e-6 * 500e-6 * 500e-6 / 12.0)
                                          .epsilon(1e-8));
    CHECK(base.areal_mass == doctest::Approx(1.165).epsilon(1e-8));
}

TEST_CASE("z-origin shift moves the neutral axis only") {
    MaterialSet mat = builtin_materials();
    auto a = laminate_reduce(mat.stack(), 1, 0.0);
    auto b = laminate_reduce(mat.stack(), 1, 1.25e-3);
    CHECK(b.neutral_axis_z - a.neutral_axis_z == doctest::Approx(1.25e-3).epsilon(1e-12));
    CHECK(b.bending_stiffness_D == doctest::Approx(a.bending_stiffness_D).epsilon(1e-13));
    CHECK(b.areal_mass == doctest::Approx(a.areal_mass).epsilon(1e-13));
    CHECK(b.piezo_moment_per_volt == doctest::Approx(a.piezo_moment_per_volt).epsilon(1e-12));
}

TEST_CASE("doubling thicknesses: D x8, mass x2") {
    MaterialSet mat = builtin_materials();
    auto a = laminate_reduce(mat.stack(), 1);
    MaterialSet dbl = mat;
    dbl.substrate.thickness *= 2.0;
    dbl.piezo.thickness *= 2.0;
    auto b = laminate_reduce(dbl.stack(), 1);
    CHECK(b.bending_stiffness_D / a.bending_stiffness_D == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(b.areal_mass / a.areal_mass == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("errors: empty stack, bad drive index") {
    MaterialSet mat = builtin_materials();
    CHECK_THROWS_AS(laminate_reduce({}, 0), ValidationError);
    CHECK_THROWS_AS(laminate_reduce(mat.stack(), 5), ValidationError);
    CHECK_THROWS_AS(laminate_reduce({mat.substrate}, 0), ValidationError); // no piezo tensor
}

TEST_CASE("material override file: density and thickness, bad keys rejected") {
    const char* path = "materials_test_override.txt";
    {
        std::ofstream f(path);
        f << "# override\n";
        f << "pzt.density_kgm3 = 7750\n";
        f << "glass.thickness_m = 450e-6\n";
    }
    MaterialSet mat = load_material_overrides(path, builtin_materials());
    CHECK(mat.piezo.density == doctest::Approx(7750.0));
    CHECK(mat.substrate.thickness == doctest::Approx(450e-6));

    {
        std::ofstream f(path);
        f << "glass.thickness_m = 450e-6\n";
        f << "bogus.key = 1\n";
        f << "glass.c_voigt = 1 2 3\n"; // wrong count
    }
    try {
        load_material_overrides(path, builtin_materials());
        CHECK(false);
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }
    std::remove(path);
}
