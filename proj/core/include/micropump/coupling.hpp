#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "micropump/fluid.hpp"
#include "micropump/plate.hpp"

namespace micropump::coupling {

struct DriveSignal {
    double amplitude = 40.0;  // V (sinusoid amplitude, 80 Vp-p)
    double frequency = 3200.0; // Hz
    double phase = 0.0;        // rad

    void validate() const;
    double period() const { return 1.0 / frequency; }
    /// Instantaneous voltage including the cosine start-up ramp over
    /// `ramp_cycles` drive periods.
    double voltage(double t, double ramp_cycles) const;
};

struct CouplingConfig {
    double dt = 0.0; // s; 0 selects period / steps_per_cycle
    int steps_per_cycle = 400;
    int subiterations_max = 20;
    double relaxation_omega0 = 0.02;
    double interface_tolerance = 1e-6;
    int cycles_total = 12;
    int cycles_averaged = 4;
    double ramp_cycles = 2.0;
    bool record_timeseries = false;

    void validate() const;
};

struct TimeSample {
    double t = 0.0;
    double voltage = 0.0;
    double w_center = 0.0;
    std::vector<double> q;
    double q_out = 0.0;           // outlet flux, m^3/s
    double p_chamber_mean = 0.0;  // Pa
};

struct CycleResult {
    double frequency_hz = 0.0;
    double net_flow_m3s = 0.0;
    double net_flow_ul_min = 0.0;
    double phase_lag_rad = 0.0;
    std::vector<double> modal_fraction; // sums to 1
    double centroid_x = 0.0, centroid_y = 0.0; // m
    double periodicity_residual = 0.0;
    bool periodic = true;
    bool zero_response = false; // all-quiet run; fractions set uniform by convention

    // run diagnostics
    double w_center_amplitude_m = 0.0;
    double peak_abs_flux_m3s = 0.0;
    double max_abs_deflection_m = 0.0;
    double max_div_residual_scaled = 0.0; // (div u - S) / (|u|max / dx)
    double max_flux_balance_rel = 0.0;    // boundary flux vs membrane volume rate
    int max_subiterations = 0;
    int unconverged_steps = 0;
    long long cg_iterations = 0;
    bool deflection_warning = false; // max |W| exceeded 0.2 h (linearized interface)
};

/// Mode shapes sampled at every chamber cell center (midpoint quadrature).
struct InterfaceCache {
    std::vector<std::vector<double>> phi; // [mode][chamber ordinal]
    std::vector<double> phi_center;       // shape at r = 0
    std::vector<double> phi_cell_sum;     // sum phi dx dy per mode

    static InterfaceCache build(const std::vector<plate::Mode>& modes, const fluid::FluidGrid& grid);
};

/// Generalized pressure forces f_k = sum_chamber p phi_k dx dy, oriented so
/// that positive chamber pressure pushes the plate away from the liquid.
std::vector<double> pressure_to_modal_forces(const std::vector<double>& p, const fluid::FluidGrid& grid,
                                             const std::vector<plate::Mode>& modes);

/// Depth-averaged dilation source S = -Wdot / h on chamber cells
/// (full-size field, zero elsewhere). Plate descending into the liquid
/// (Wdot < 0) expels it: S > 0.
std::vector<double> membrane_source(const std::vector<plate::Mode>& modes,
                                    const plate::ModalState& state, const fluid::FluidGrid& grid,
                                    double depth);

/// |W|-weighted centroid of a chamber field; chamber center when the field
/// vanishes. `w` is indexed by chamber ordinal.
std::pair<double, double> mode_centroid(const std::vector<double>& w, const fluid::FluidGrid& grid);

struct HarmonicFit {
    double amplitude = 0.0;
    double phase_lag = 0.0; // rad, positive = lagging the drive; [-pi/2, 3pi/2)
    double offset = 0.0;
};

/// Least-squares fit of w(t) ~ a sin(omega t + phase0) + b cos(...) + c;
/// lag = atan2(-b, a). Zero signal fits to zero lag.
HarmonicFit fit_harmonic(std::span<const double> t, std::span<const double> w, double omega,
                         double phase0);

/// Two-way partitioned simulation: plate modes vs masked fluid grid, staggered
/// per step with optional Aitken-relaxed sub-iterations on the interface modal
/// velocity vector.
class CoupledSim {
public:
    CoupledSim(const std::vector<plate::Mode>& modes, const std::vector<double>& piezo_force_per_volt,
               const fluid::FluidGrid& grid, const fluid::FluidProps& props, double depth,
               DriveSignal drive, CouplingConfig config);

    /// Advance one dt. Protects the run with the divergence guard and the
    /// conservation asserts.
    void step();

    CycleResult run_cycles();

    const plate::ModalState& modal_state() const { return plate_state_; }
    const fluid::FlowState& flow_state() const { return flow_; }
    const std::vector<TimeSample>& timeseries() const { return samples_; }
    double dt() const { return dt_; }
    int steps_per_cycle() const { return spc_; }

    /// Optional per-step field snapshot hook (step index, state).
    std::function<void(int, const fluid::FlowState&)> snapshot_hook;
    int snapshot_every = 0;

private:
    void fluid_substep(const std::vector<double>& interface_qdot, std::vector<double>& forces_out,
                       double tighten = 1.0);
    double scaled_divergence_residual() const;
    double chamber_deflection_stats(double& max_abs_w); // fills wfield_, returns sum|W|

    const std::vector<plate::Mode>& modes_;
    std::vector<double> piezo_per_volt_;
    const fluid::FluidGrid& grid_;
    fluid::FluidProps props_;
    double depth_;
    DriveSignal drive_;
    CouplingConfig cfg_;
    InterfaceCache cache_;

    plate::ModalState plate_state_;
    fluid::FlowState flow_;
    fluid::PressureSolver solver_;
    std::vector<double> f_pressure_; // accepted pressure forces from last step

    // workspaces
    std::vector<double> ustar_, vstar_, unew_, vnew_, source_, wfield_;

    double dt_ = 0.0;
    int spc_ = 0;
    int step_index_ = 0;

    // accumulated diagnostics for the current run
    CycleResult diag_;
    std::vector<TimeSample> samples_;

    friend class CoupledSimTestAccess;
};

} // namespace micropump::coupling
