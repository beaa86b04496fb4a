#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace micropump::materials {

/// 6x6 stiffness matrix in Voigt order, Pa. Must be symmetric as stored and
/// positive definite; validate() reports the offending entry/eigenvalue.
struct ElasticTensor {
    std::array<std::array<double, 6>, 6> c{};

    void validate(const std::string& label) const;
    double smallest_eigenvalue() const;
};

/// 3x6 piezoelectric stress constants e_kij in Voigt column order, C/m^2.
/// For the symmetry class used here rows 1-2 couple only to shear columns;
/// validate() checks the stored pattern rather than assuming it.
struct PiezoTensor {
    std::array<std::array<double, 6>, 3> e{};

    void validate(const std::string& label) const;
};

struct Layer {
    double thickness = 0.0; // m
    double density = 0.0;   // kg/m^3
    ElasticTensor elastic;
    std::optional<PiezoTensor> piezo;

    void validate(const std::string& label) const;
};

/// Plate-level constants of the reduced laminate.
struct LaminateConstants {
    double bending_stiffness_D = 0.0;  // N*m
    double areal_mass = 0.0;           // kg/m^2
    double neutral_axis_z = 0.0;       // m, from stack bottom (plus any origin offset)
    double piezo_moment_per_volt = 0.0;// (N*m/m)/V
    double effective_e31 = 0.0;        // C/m^2
};

struct IsotropicEquivalents {
    double youngs_modulus = 0.0; // Pa
    double poisson_ratio = 0.0;
};

/// In-plane isotropic equivalents from C11, C12:
///   E  = (C11-C12)(C11+2 C12)/(C11+C12),  nu = C12/(C11+C12)
IsotropicEquivalents isotropic_equivalents(const ElasticTensor& elastic);

/// Plane-stress condensation  e31_eff = e31 - e33 C13/C33  (sigma_33 = 0).
double effective_e31(const Layer& layer);

/// Classical lamination reduction of an ordered stack (bottom first) to a
/// single Kirchhoff plate: neutral axis from E' t z moments, D from E'-weighted
/// third moments about it, areal mass, and the voltage-to-moment coefficient of
/// the drive layer (uniform through-thickness field E3 = V/t).
/// `z_origin` only offsets the reported neutral axis coordinate.
LaminateConstants laminate_reduce(const std::vector<Layer>& stack, std::size_t drive_layer_index,
                                  double z_origin = 0.0);

/// Built-in two-layer stack: 500 um substrate + 200 um piezo drive layer,
/// densities 2330 kg/m^3 each. Index 0 = substrate, 1 = drive layer.
struct MaterialSet {
    Layer substrate;
    Layer piezo;

    std::vector<Layer> stack() const { return {substrate, piezo}; }
    static constexpr std::size_t drive_index = 1;
};

MaterialSet builtin_materials();

/// Applies key=value overrides from a material file. Recognized keys use the
/// layer prefixes `glass.` and `pzt.`:
///   <layer>.thickness_m, <layer>.density_kgm3,
///   <layer>.c_voigt (36 numbers, row-major), <layer>.e_matrix (18 numbers).
/// Unknown keys and malformed values are rejected with line numbers.
MaterialSet load_material_overrides(const std::string& path, MaterialSet base);

} // namespace micropump::materials
