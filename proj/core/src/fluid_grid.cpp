#include "micropump/fluid.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "micropump/errors.hpp"

namespace micropump::fluid {

void PumpGeometry::validate() const {
    IssueList issues;
    auto pos = [&](double v, const char* name) {
        if (!(v > 0.0)) issues.add(std::string("geometry: ") + name + " must be > 0");
    };
    pos(channel_width, "channel width W");
    pos(obstacle_width, "obstacle width W1");
    pos(channel_length, "channel length L");
    pos(obstacle_section, "obstacle section L1");
    pos(wedge_half_angle, "wedge half-angle alpha");
    pos(chamber_radius, "chamber radius r");
    pos(depth, "depth h");
    if (!(obstacle_width < 0.5 * channel_width))
        issues.add("geometry: W1 must be < W/2");
    if (!(obstacle_section <= channel_length))
        issues.add("geometry: L1 must be <= L");
    if (inlet_wedge_dir != 1 && inlet_wedge_dir != -1)
        issues.add("geometry: inlet wedge dir must be +1 or -1");
    if (outlet_wedge_dir != 1 && outlet_wedge_dir != -1)
        issues.add("geometry: outlet wedge dir must be +1 or -1");
    issues.throw_if_any();
}

void FluidProps::validate() const {
    IssueList issues;
    if (!(density > 0.0)) issues.add("fluid: density must be > 0");
    if (!(kinematic_visc > 0.0)) issues.add("fluid: kinematic viscosity must be > 0");
    issues.throw_if_any();
}

bool FluidGrid::u_face_active(int i, int j) const {
    if (j < 0 || j >= ny || i < 0 || i > nx) return false;
    if (i == 0) return is_open(at(0, j));
    if (i == nx) return is_open(at(nx - 1, j));
    return is_wet(at(i - 1, j)) && is_wet(at(i, j));
}

bool FluidGrid::v_face_active(int i, int j) const {
    if (i < 0 || i >= nx || j < 0 || j > ny) return false;
    if (j == 0) return is_open(at(i, 0));
    if (j == ny) return is_open(at(i, ny - 1));
    return is_wet(at(i, j - 1)) && is_wet(at(i, j));
}

void FluidGrid::finalize() {
    IssueList issues;
    cell_index.assign(static_cast<std::size_t>(nx) * ny, -1);
    fluid_cells.clear();
    chamber_cells.clear();
    chamber_r.clear();
    chamber_theta.clear();
    chamber_x.clear();
    chamber_y.clear();

    int n_open = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Cell c = mask[id(i, j)];
            if (!is_wet(c)) continue;
            cell_index[id(i, j)] = static_cast<int>(fluid_cells.size());
            fluid_cells.push_back(static_cast<int>(id(i, j)));
            bool on_boundary = (i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
            if (is_open(c)) {
                ++n_open;
                if (!on_boundary)
                    issues.add("grid: open cell (" + std::to_string(i) + "," + std::to_string(j) +
                               ") not on the domain boundary");
            } else if (on_boundary) {
                issues.add("grid: FLUID cell (" + std::to_string(i) + "," + std::to_string(j) +
                           ") touches the outer box away from INLET/OUTLET (mask not watertight)");
            }
            if (c == Cell::Chamber) {
                double x = x_center(i), y = y_center(j);
                chamber_cells.push_back(static_cast<int>(id(i, j)));
                chamber_x.push_back(x);
                chamber_y.push_back(y);
                chamber_r.push_back(std::hypot(x, y));
                chamber_theta.push_back(std::atan2(y, x));
            }
        }
    }
    if (fluid_cells.empty()) issues.add("grid: no fluid cells");
    issues.throw_if_any();
    (void)n_open;
}

FluidGrid build_grid(const PumpGeometry& g, double target_dx) {
    g.validate();
    if (!(target_dx > 0.0)) throw ValidationError("build_grid: target_dx must be > 0");
    if (target_dx > g.obstacle_width)
        throw ValidationError("build_grid: target_dx too coarse: obstacles need at least one cell "
                              "(target_dx <= W1 = " + std::to_string(g.obstacle_width) + " m)");

    FluidGrid grid;
    grid.dx = target_dx;
    grid.dy = target_dx;
    const double half_len = g.chamber_radius + g.channel_length;
    grid.nx = 2 * static_cast<int>(std::floor(half_len / grid.dx + 0.5));
    grid.ny = 2 * (static_cast<int>(std::ceil(g.chamber_radius / grid.dy)) + 1);
    if (grid.nx < 4) throw ValidationError("build_grid: target_dx too coarse for the planform");
    grid.chamber_radius = g.chamber_radius;
    grid.mask.assign(static_cast<std::size_t>(grid.nx) * grid.ny, Cell::Solid);

    const double r = g.chamber_radius;
    const double w2 = 0.5 * g.channel_width;
    const double tana = std::tan(g.wedge_half_angle);
    const double margin = 0.5 * (g.channel_length - g.obstacle_section);

    // wedge half-width at local coordinate zeta in [0, L1] from its root
    auto wedge_solid = [&](double zeta, double y) {
        if (zeta < 0.0 || zeta > g.obstacle_section) return false;
        return std::fabs(y) <= 0.5 * g.obstacle_width + zeta * tana;
    };

    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y_center(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x_center(i);
            const bool in_disk = (x * x + y * y < r * r);
            const bool in_strip = (std::fabs(y) <= w2) && (std::fabs(x) <= half_len);
            if (!in_disk && !in_strip) continue;

            bool solid = false;
            if (!in_disk && x < 0.0) { // inlet channel
                const double s_lo = -half_len + margin;
                const double s_hi = -r - margin;
                const double zeta = (g.inlet_wedge_dir > 0) ? (x - s_lo) : (s_hi - x);
                solid = wedge_solid(zeta, y);
            } else if (!in_disk && x > 0.0) { // outlet channel
                const double s_lo = r + margin;
                const double s_hi = half_len - margin;
                const double zeta = (g.outlet_wedge_dir > 0) ? (x - s_lo) : (s_hi - x);
                solid = wedge_solid(zeta, y);
            }
            if (solid) continue;

            Cell c = in_disk ? Cell::Chamber : Cell::Fluid;
            if (i == 0) c = Cell::Inlet;
            if (i == grid.nx - 1) c = Cell::Outlet;
            grid.mask[grid.id(i, j)] = c;
        }
    }

    grid.finalize();
    bool has_inlet = false, has_outlet = false;
    for (int cid : grid.fluid_cells) {
        Cell c = grid.mask[static_cast<std::size_t>(cid)];
        has_inlet |= (c == Cell::Inlet);
        has_outlet |= (c == Cell::Outlet);
    }
    if (!has_inlet || !has_outlet)
        throw ValidationError("build_grid: channel ends did not rasterize to open cells "
                              "(target_dx too coarse for the channel width)");
    return grid;
}

std::string format_snapshot(const FlowState& state, const FluidGrid& grid) {
    std::ostringstream out;
    out.precision(17);
    out << "nx " << grid.nx << "\nny " << grid.ny << "\ndx " << grid.dx << "\ndy " << grid.dy
        << "\ntime " << state.time << "\n";
    auto dump = [&out](const char* name, const std::vector<double>& a) {
        out << name << "\n";
        for (std::size_t k = 0; k < a.size(); ++k) out << a[k] << ((k + 1) % 8 == 0 ? '\n' : ' ');
        if (a.size() % 8) out << '\n';
    };
    dump("u", state.u);
    dump("v", state.v);
    dump("p", state.p);
    out << "mask\n";
    for (std::size_t k = 0; k < grid.mask.size(); ++k)
        out << static_cast<int>(grid.mask[k]) << ((k + 1) % 32 == 0 ? '\n' : ' ');
    if (grid.mask.size() % 32) out << '\n';
    return out.str();
}

} // namespace micropump::fluid
