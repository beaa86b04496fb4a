#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace micropump::fluid {

/// Planform of the pump: inlet channel + circular chamber + outlet channel,
/// collinear along x, one wedge obstacle per channel. Wedge direction +1 means
/// the wedge widens toward +x (the outlet side); the root (narrow end) has
/// width `obstacle_width`.
struct PumpGeometry {
    double channel_width = 522e-6;      // W
    double obstacle_width = 40e-6;      // W1
    double channel_length = 1093e-6;    // L
    double obstacle_section = 1000e-6;  // L1
    double wedge_half_angle = 7.0 * 3.14159265358979323846 / 180.0; // alpha, rad
    double chamber_radius = 3000e-6;    // r
    double depth = 80e-6;               // h
    int inlet_wedge_dir = +1;
    int outlet_wedge_dir = +1;

    void validate() const;
};

struct FluidProps {
    double density = 1000.0;        // rho, kg/m^3
    double kinematic_visc = 1.1e-6; // nu, m^2/s

    void validate() const;
};

enum class Cell : std::uint8_t { Solid, Fluid, Inlet, Outlet, Chamber };

inline bool is_wet(Cell c) { return c != Cell::Solid; }
inline bool is_open(Cell c) { return c == Cell::Inlet || c == Cell::Outlet; }

/// Staggered (MAC) grid over the masked planform. Cell (i,j) center sits at
/// ((i - nx/2 + 0.5) dx, (j - ny/2 + 0.5) dy); nx and ny are even so the
/// layout mirrors cell-exactly in x and y. u faces: (nx+1) x ny; v faces:
/// nx x (ny+1); p: nx x ny.
struct FluidGrid {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;

    std::vector<Cell> mask;         // nx*ny, row-major j*nx + i
    std::vector<int> cell_index;    // fluid ordinal or -1
    std::vector<int> fluid_cells;   // linear ids of wet cells
    std::vector<int> chamber_cells; // linear ids
    std::vector<double> chamber_r, chamber_theta, chamber_x, chamber_y;
    double chamber_radius = 0.0;

    Cell at(int i, int j) const {
        return (i < 0 || j < 0 || i >= nx || j >= ny) ? Cell::Solid : mask[static_cast<std::size_t>(j) * nx + i];
    }
    double x_center(int i) const { return (i - nx / 2 + 0.5) * dx; }
    double y_center(int j) const { return (j - ny / 2 + 0.5) * dy; }
    std::size_t id(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    bool u_face_active(int i, int j) const;
    bool v_face_active(int i, int j) const;

    /// index builders + invariant checks (watertight mask, open cells on the
    /// boundary, chamber subset of fluid). Call after editing `mask` by hand.
    void finalize();
};

/// Rasterizes the pump planform at uniform spacing dx = dy = target_dx.
/// Throws when target_dx exceeds the obstacle root width or the geometry is
/// invalid.
FluidGrid build_grid(const PumpGeometry& geometry, double target_dx);

struct FlowState {
    int nx = 0, ny = 0;
    std::vector<double> u; // (nx+1) * ny
    std::vector<double> v; // nx * (ny+1)
    std::vector<double> p; // nx * ny
    double time = 0.0;

    FlowState() = default;
    explicit FlowState(const FluidGrid& g)
        : nx(g.nx), ny(g.ny), u(static_cast<std::size_t>(g.nx + 1) * g.ny, 0.0),
          v(static_cast<std::size_t>(g.nx) * (g.ny + 1), 0.0),
          p(static_cast<std::size_t>(g.nx) * g.ny, 0.0) {}

    std::size_t uid(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + i; }
    std::size_t vid(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    std::size_t pid(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

/// Explicit predictor: first-order upwind advection, central diffusion,
/// shallow-depth drag handled implicitly (divide by 1 + 12 nu dt / h^2),
/// optional uniform body force. No pressure. Zero-gradient at open boundary
/// faces, no-slip mirrors at walls. Throws NumericalError naming the binding
/// constraint when dt > 0.5 min(dx/|u|, dx^2/(4 nu), h^2/(24 nu)).
void momentum_predict(const FlowState& state, const FluidGrid& grid, const FluidProps& props,
                      double depth, double dt, double gx, double gy, std::vector<double>& ustar,
                      std::vector<double>& vstar);

/// Matrix-free 5-point Poisson operator on the masked domain with Neumann
/// walls and p = 0 (ghost-mirrored) at open boundary faces. Jacobi-
/// preconditioned conjugate gradient.
class PressureSolver {
public:
    explicit PressureSolver(const FluidGrid& grid);

    /// Solves A p = rhs (A = -lap). `p` is both warm start and result (cell
    /// layout, entries outside fluid ignored). Stops when the 2-norm residual
    /// falls at or below rel_tol*||rhs|| and the inf-norm at or below abs_inf;
    /// throws NumericalError with the residual-history tail on stagnation.
    int solve(const std::vector<double>& rhs, std::vector<double>& p, double rel_tol,
              double abs_inf);

    bool has_open_boundary() const { return has_open_; }
    const FluidGrid& grid() const { return grid_; }

private:
    void apply(const std::vector<double>& x, std::vector<double>& out) const;
    void scatter_to(std::vector<double>& p) const;

    const FluidGrid& grid_;
    std::vector<int> nb_[4]; // fluid-ordinal neighbors (-1 if none): W,E,S,N
    std::vector<double> diag_;
    bool has_open_ = false;
    // scratch
    std::vector<double> r_, z_, d_, q_, x_;
};

/// Pressure Poisson step: lap p = (rho/dt) (div u* - S). S lives on chamber
/// cells (full-size array, zero elsewhere). Dirichlet p = 0 through open
/// boundary faces; a closed mask with a net source is rejected as
/// incompatible. Relative CG tolerance 1e-9 plus an absolute divergence
/// target so the projected field meets the 1e-8 scaled residual bound.
int pressure_solve(PressureSolver& solver, const std::vector<double>& ustar,
                   const std::vector<double>& vstar, const std::vector<double>& source,
                   const FluidProps& props, double dt, std::vector<double>& p,
                   double extra_tighten = 1.0);

/// Velocity correction u = u* - (dt/rho) grad p on every active face.
void project(const std::vector<double>& ustar, const std::vector<double>& vstar,
             const std::vector<double>& p, const FluidGrid& grid, const FluidProps& props, double dt,
             std::vector<double>& u, std::vector<double>& v);

/// max over wet cells of |div u - S|
double max_divergence_residual(const std::vector<double>& u, const std::vector<double>& v,
                               const std::vector<double>& source, const FluidGrid& grid);

double max_face_speed(const std::vector<double>& u, const std::vector<double>& v);

struct BoundaryFlux {
    double inlet_outward = 0.0;  // m^3/s leaving through INLET faces
    double outlet_outward = 0.0; // m^3/s leaving through OUTLET faces
};

BoundaryFlux boundary_fluxes(const FlowState& state, const FluidGrid& grid, double depth);

/// Volume flux through the outlet, positive toward the outlet (outward).
double outlet_flux(const FlowState& state, const FluidGrid& grid, double depth);

inline double m3s_to_ul_min(double q) { return q * 6e10; }

/// Total volume rate injected by the membrane source field, m^3/s.
double source_volume_rate(const std::vector<double>& source, const FluidGrid& grid, double depth);

/// Plain-text field snapshot: header (nx, ny, dx, dy, time) then row-major
/// u, v, p, mask blocks.
std::string format_snapshot(const FlowState& state, const FluidGrid& grid);

} // namespace micropump::fluid
