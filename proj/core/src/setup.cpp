#include "micropump/setup.hpp"

#include <cmath>
#include <numbers>

#include "micropump/errors.hpp"

namespace micropump::setup {

int System::mode_index(int n, int radial_order) const {
    for (std::size_t k = 0; k < modes.size(); ++k)
        if (modes[k].n == n && modes[k].radial_order == radial_order) return static_cast<int>(k);
    return -1;
}

coupling::DriveSignal drive_from(const config::RunConfig& cfg) {
    coupling::DriveSignal d;
    d.amplitude = cfg.drive.amplitude_v;
    d.frequency = cfg.drive.frequency_hz;
    d.phase = cfg.drive.phase_rad;
    return d;
}

coupling::CouplingConfig coupling_from(const config::RunConfig& cfg) {
    coupling::CouplingConfig cc;
    cc.dt = cfg.coupling.dt_s;
    cc.steps_per_cycle = cfg.coupling.steps_per_cycle;
    cc.subiterations_max = cfg.coupling.subiterations_max;
    cc.relaxation_omega0 = cfg.coupling.relaxation_omega0;
    cc.interface_tolerance = cfg.coupling.interface_tolerance;
    cc.cycles_total = cfg.coupling.cycles_total;
    cc.cycles_averaged = cfg.coupling.cycles_averaged;
    cc.ramp_cycles = cfg.coupling.ramp_cycles;
    cc.record_timeseries = cfg.output.timeseries;
    return cc;
}

System build_structure(const config::RunConfig& cfg) {
    config::validate(cfg);

    System sys;
    sys.mats = materials::builtin_materials();
    if (!cfg.materials.file.empty())
        sys.mats = materials::load_material_overrides(cfg.materials.file, sys.mats);
    sys.mats.substrate.density = cfg.materials.glass_density_kgm3;
    sys.mats.piezo.density = cfg.materials.pzt_density_kgm3;

    sys.laminate = materials::laminate_reduce(sys.mats.stack(), materials::MaterialSet::drive_index);

    sys.plate_model.radius = cfg.plate.radius_m;
    sys.plate_model.constants = sys.laminate;
    sys.plate_model.damping_zeta = cfg.plate.damping_zeta;
    sys.plate_model.taper_width = cfg.plate.taper_width_frac * cfg.plate.radius_m;

    for (int n : cfg.plate.harmonics) {
        auto modes = plate::radial_eigensolve(sys.plate_model, n, cfg.plate.radial_orders,
                                              cfg.plate.elements);
        for (auto& m : modes) sys.modes.push_back(std::move(m));
    }
    sys.piezo_per_volt.resize(sys.modes.size());
    for (std::size_t k = 0; k < sys.modes.size(); ++k)
        sys.piezo_per_volt[k] = plate::piezo_force_per_volt(sys.plate_model, sys.modes[k]);

    int i01 = sys.mode_index(0, 1);
    if (i01 < 0) throw ValidationError("config: the retained basis must include harmonic n = 0 "
                                       "(plate.harmonics) to drive the pump");
    sys.f1_dry_hz = sys.modes[static_cast<std::size_t>(i01)].omega / (2.0 * std::numbers::pi);

    sys.geometry.channel_width = cfg.geometry.channel_width_m;
    sys.geometry.obstacle_width = cfg.geometry.obstacle_width_m;
    sys.geometry.channel_length = cfg.geometry.channel_length_m;
    sys.geometry.obstacle_section = cfg.geometry.obstacle_section_m;
    sys.geometry.wedge_half_angle = cfg.geometry.wedge_half_angle_deg * std::numbers::pi / 180.0;
    sys.geometry.chamber_radius = cfg.geometry.chamber_radius_m;
    sys.geometry.depth = cfg.geometry.depth_m;
    sys.geometry.inlet_wedge_dir = cfg.geometry.inlet_wedge_dir;
    sys.geometry.outlet_wedge_dir = cfg.geometry.outlet_wedge_dir;
    sys.geometry.validate();

    sys.props.density = cfg.fluid.density_kgm3;
    sys.props.kinematic_visc = cfg.fluid.kinematic_visc_m2s;
    sys.props.validate();

    sys.f1_wet_estimate_hz = plate::coupled_frequency_estimate(
        sys.modes[static_cast<std::size_t>(i01)], sys.props.density, sys.geometry.depth,
        sys.geometry.channel_length, sys.geometry.channel_width);
    return sys;
}

System build_system(const config::RunConfig& cfg) {
    System sys = build_structure(cfg);
    sys.grid = fluid::build_grid(sys.geometry, cfg.grid.target_dx_m);
    return sys;
}

} // namespace micropump::setup
