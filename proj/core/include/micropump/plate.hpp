#pragma once

#include <vector>

#include "micropump/materials.hpp"

namespace micropump::plate {

enum class Angular { Cos, Sin };

/// Clamped circular laminated plate. `taper_width` regularizes the
/// piezo edge-moment loading (defaults to radius/16 when left at 0).
struct PlateModel {
    double radius = 0.0; // m
    materials::LaminateConstants constants;
    double damping_zeta = 0.02;
    double taper_width = 0.0; // m

    double taper() const { return taper_width > 0.0 ? taper_width : radius / 16.0; }
    void validate() const;
};

/// One mass-normalized mode W_k(r,theta) = R_k(r) * {cos,sin}(n theta).
/// Modal mass is 1 kg: integral of rho h W_k^2 over the disk equals one.
struct Mode {
    int n = 0;
    int radial_order = 0; // s, 1-based within its harmonic
    double omega = 0.0;   // rad/s
    double zeta = 0.0;
    Angular angular = Angular::Cos;
    double radius = 0.0;

    std::vector<double> node_r;
    std::vector<double> node_value; // R at nodes
    std::vector<double> node_slope; // dR/dr at nodes
    double modal_mass = 1.0;
    double norm_residual = 0.0; // independent-quadrature check of mass normalization

    /// Hermite interpolation of R and dR/dr; identically zero for r >= radius.
    void eval_radial(double r, double& value, double& slope) const;
    double radial_value(double r) const;
    double radial_curvature(double r) const; // d2R/dr2 inside elements

    /// Full shape R(r) * cos/sin(n theta); zero outside the clamp circle.
    double shape(double r, double theta) const;
};

struct ModalState {
    std::vector<double> q;     // modal coordinates
    std::vector<double> qdot;  // modal velocities
    std::vector<double> qddot; // accelerations (Newmark history)
    double time = 0.0;

    explicit ModalState(std::size_t n = 0) : q(n, 0.0), qdot(n, 0.0), qddot(n, 0.0) {}
};

/// Modes of circumferential harmonic n by cubic-Hermite FEM in r on [0, radius]
/// with weight r dr. Clamped edge R(a) = R'(a) = 0; center conditions by n
/// (n=0: R'(0)=0, n=1: R(0)=0, n>=2: both). Generalized eigenproblem solved by
/// Cholesky reduction + Householder/QL. Ascending frequency, mass-normalized.
std::vector<Mode> radial_eigensolve(const PlateModel& model, int n, int num_modes, int elements,
                                    Angular angular = Angular::Cos);

/// Generalized piezo force per volt: f_k(V) = V * piezo_force_per_volt(...).
/// The drive moment acts over the plate footprint with a cosine edge taper;
/// evaluated in the integrated-by-parts form -Mpv * 2 pi * int T'(r) R'(r) r dr.
/// Zero for every n >= 1 mode (the theta integral vanishes).
double piezo_force_per_volt(const PlateModel& model, const Mode& mode);

/// Same quantity by direct area quadrature of T(r) * lap(R) with each element
/// split `subdiv` times; cross-check route for the boundary-parts evaluation.
double piezo_force_per_volt_area(const PlateModel& model, const Mode& mode, int subdiv);

/// One Newmark step (average acceleration, gamma=1/2, beta=1/4) of
///   qddot_k + 2 zeta_k w_k qdot_k + w_k^2 q_k = f_k   (modal mass 1).
/// `forces` are the generalized forces at t + dt.
void modal_step(ModalState& state, const std::vector<Mode>& modes, const std::vector<double>& forces,
                double dt);

/// W = sum q_k shape_k at one point (helper; bulk evaluation is cached by the
/// coupling layer).
double deflection_at(const std::vector<Mode>& modes, const std::vector<double>& q, double r,
                     double theta);

/// Added-mass estimate for an n=0 mode loaded by an incompressible liquid film
/// of the given depth that vents through two opposite channels: internal
/// squeeze-flow inertia plus port inertance, both per unit modal mass.
/// Returns the estimated wet natural frequency in Hz.
double coupled_frequency_estimate(const Mode& mode, double fluid_density, double depth,
                                  double port_length, double port_width);

} // namespace micropump::plate
