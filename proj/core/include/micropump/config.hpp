#pragma once

#include <string>
#include <vector>

namespace micropump::config {

/// Full run configuration. Defaults reproduce the built-in device: material
/// tables, 522/40/1093/1000 um channel with 7 deg wedges, 3 mm chamber,
/// 80 um depth, 40 V sinusoidal drive.
struct RunConfig {
    struct Materials {
        std::string file;                  // optional override file
        double glass_density_kgm3 = 2330.0;
        double pzt_density_kgm3 = 2330.0;
    } materials;

    struct Plate {
        double radius_m = 3000e-6;
        double damping_zeta = 0.02;
        std::vector<int> harmonics{0, 1, 2};
        int radial_orders = 3;
        int elements = 128;
        double taper_width_frac = 0.0625; // edge-moment taper width / radius
    } plate;

    struct Geometry {
        double channel_width_m = 522e-6;
        double obstacle_width_m = 40e-6;
        double channel_length_m = 1093e-6;
        double obstacle_section_m = 1000e-6;
        double wedge_half_angle_deg = 7.0;
        double chamber_radius_m = 3000e-6;
        double depth_m = 80e-6;
        int inlet_wedge_dir = 1;  // +1 widens toward the outlet
        int outlet_wedge_dir = 1; // -1 mirrors the outlet wedge (symmetric pump)
    } geometry;

    struct Fluid {
        double density_kgm3 = 1000.0;
        double kinematic_visc_m2s = 1.1e-6;
    } fluid;

    struct Grid {
        double target_dx_m = 40e-6;
    } grid;

    struct Drive {
        double amplitude_v = 40.0;
        double frequency_hz = 3200.0;
        double phase_rad = 0.0;
    } drive;

    struct Sweep {
        std::vector<double> frequencies_hz; // explicit grid; empty = log-spaced
        int points = 15;
        double fmin_hz = 500.0;
        double fmax_hz = 0.0; // 0 = 1.5 x estimated coupled fundamental
    } sweep;

    struct Coupling {
        double dt_s = 0.0; // 0 = period / steps_per_cycle
        int steps_per_cycle = 400;
        int subiterations_max = 20;
        double relaxation_omega0 = 0.02;
        double interface_tolerance = 1e-6;
        int cycles_total = 12;
        int cycles_averaged = 4;
        double ramp_cycles = 2.0;
    } coupling;

    struct Output {
        std::string dir = "out";
        bool timeseries = true;
        int snapshot_every = 0; // steps; 0 = never
        int jobs = 0;           // sweep workers; 0 = hardware concurrency
    } output;
};

/// Parses `key = value` lines ('#' comments). Unknown keys, malformed values
/// and duplicate definitions are reported with line numbers; semantic
/// validation lists every violation.
RunConfig parse_config_text(const std::string& text, const std::string& source_name,
                            RunConfig base = {});

RunConfig load_config(const std::string& path, RunConfig base = {});

/// Semantic checks across the whole config (ranges, sweep ordering, ...).
void validate(const RunConfig& cfg);

/// Canonical serialization; parses back to an identical config.
std::string serialize(const RunConfig& cfg);

/// Same with a documentation comment per section (the --print-defaults form).
std::string serialize_documented(const RunConfig& cfg);

/// FNV-1a hash of the result-relevant keys (output.* excluded), hex.
std::string config_hash(const RunConfig& cfg);

} // namespace micropump::config
