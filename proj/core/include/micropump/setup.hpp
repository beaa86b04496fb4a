#pragma once

#include <vector>

#include "micropump/config.hpp"
#include "micropump/coupling.hpp"
#include "micropump/fluid.hpp"
#include "micropump/materials.hpp"
#include "micropump/plate.hpp"

namespace micropump::setup {

/// Everything a coupled run needs, built once and shared read-only between
/// sweep workers.
struct System {
    materials::MaterialSet mats;
    materials::LaminateConstants laminate;
    plate::PlateModel plate_model;
    std::vector<plate::Mode> modes;       // harmonics outer, radial orders inner
    std::vector<double> piezo_per_volt;   // generalized piezo force per volt, per mode
    fluid::PumpGeometry geometry;
    fluid::FluidProps props;
    fluid::FluidGrid grid;
    double f1_dry_hz = 0.0;
    double f1_wet_estimate_hz = 0.0;

    int mode_index(int n, int radial_order) const; // -1 when absent
};

System build_system(const config::RunConfig& cfg);

/// Plate-and-materials part only (no fluid grid); enough for `modes`.
System build_structure(const config::RunConfig& cfg);

coupling::DriveSignal drive_from(const config::RunConfig& cfg);
coupling::CouplingConfig coupling_from(const config::RunConfig& cfg);

} // namespace micropump::setup
