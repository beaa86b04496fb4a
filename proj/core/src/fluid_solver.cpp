#include "micropump/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <string>

#include "micropump/errors.hpp"

namespace micropump::fluid {

namespace {

double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

} // namespace

double max_face_speed(const std::vector<double>& u, const std::vector<double>& v) {
    return std::max(max_abs(u), max_abs(v));
}

void momentum_predict(const FlowState& state, const FluidGrid& grid, const FluidProps& props,
                      double depth, double dt, double gx, double gy, std::vector<double>& ustar,
                      std::vector<double>& vstar) {
    const int nx = grid.nx, ny = grid.ny;
    const double dx = grid.dx, dy = grid.dy;
    const double nu = props.kinematic_visc;

    // CFL / stability preconditions, each named so violations are actionable
    const double umax = max_abs(state.u), vmax = max_abs(state.v);
    const double lim_adv_u = umax > 0.0 ? dx / umax : 1e300;
    const double lim_adv_v = vmax > 0.0 ? dy / vmax : 1e300;
    const double lim_diff = std::min(dx, dy) * std::min(dx, dy) / (4.0 * nu);
    const double lim_drag = depth * depth / (24.0 * nu);
    struct Lim { double v; const char* name; };
    const Lim lims[] = {{lim_adv_u, "advection dx/|u|max"},
                        {lim_adv_v, "advection dy/|v|max"},
                        {lim_diff, "diffusion dx^2/(4 nu)"},
                        {lim_drag, "depth drag h^2/(24 nu)"}};
    for (const auto& l : lims)
        if (dt > 0.5 * l.v)
            throw NumericalError("momentum_predict: dt = " + std::to_string(dt) +
                                 " s violates CFL, binding constraint: " + l.name + " = " +
                                 std::to_string(l.v) + " s (need dt <= half that)");

    ustar.assign(state.u.size(), 0.0);
    vstar.assign(state.v.size(), 0.0);
    const double drag_div = 1.0 + 12.0 * nu * dt / (depth * depth);

    const auto& u = state.u;
    const auto& v = state.v;
    auto uid = [nx](int i, int j) { return static_cast<std::size_t>(j) * (nx + 1) + i; };
    auto vid = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };

    // tangential neighbor with wall mirror / open zero-gradient ghosts
    auto u_nb_y = [&](int i, int j, int jn) -> double {
        if (jn < 0 || jn >= ny)
            return (is_open(grid.at(i - 1, j)) || is_open(grid.at(i, j))) ? u[uid(i, j)] : -u[uid(i, j)];
        if (!is_wet(grid.at(i - 1, jn)) && !is_wet(grid.at(i, jn))) return -u[uid(i, j)];
        return u[uid(i, jn)];
    };
    auto v_nb_x = [&](int i, int j, int in) -> double {
        if (in < 0 || in >= nx)
            return (is_open(grid.at(i, j - 1)) || is_open(grid.at(i, j))) ? v[vid(i, j)] : -v[vid(i, j)];
        if (!is_wet(grid.at(in, j - 1)) && !is_wet(grid.at(in, j))) return -v[vid(i, j)];
        return v[vid(in, j)];
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            if (!grid.u_face_active(i, j)) continue;
            const double uc = u[uid(i, j)];
            const double uw = u[uid(i - 1, j)];
            const double ue = u[uid(i + 1, j)];
            const double us = u_nb_y(i, j, j - 1);
            const double un = u_nb_y(i, j, j + 1);
            const double vbar = 0.25 * (v[vid(i - 1, j)] + v[vid(i, j)] + v[vid(i - 1, j + 1)] +
                                        v[vid(i, j + 1)]);
            const double dudx = uc > 0.0 ? (uc - uw) / dx : (ue - uc) / dx;
            const double dudy = vbar > 0.0 ? (uc - us) / dy : (un - uc) / dy;
            const double lap = (ue - 2.0 * uc + uw) / (dx * dx) + (un - 2.0 * uc + us) / (dy * dy);
            const double rhs = uc + dt * (-(uc * dudx + vbar * dudy) + nu * lap + gx);
            ustar[uid(i, j)] = rhs / drag_div;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!grid.v_face_active(i, j)) continue;
            const double vc = v[vid(i, j)];
            const double vs = v[vid(i, j - 1)];
            const double vn = v[vid(i, j + 1)];
            const double vw = v_nb_x(i, j, i - 1);
            const double ve = v_nb_x(i, j, i + 1);
            const double ubar = 0.25 * (u[uid(i, j - 1)] + u[uid(i + 1, j - 1)] + u[uid(i, j)] +
                                        u[uid(i + 1, j)]);
            const double dvdy = vc > 0.0 ? (vc - vs) / dy : (vn - vc) / dy;
            const double dvdx = ubar > 0.0 ? (vc - vw) / dx : (ve - vc) / dx;
            const double lap = (ve - 2.0 * vc + vw) / (dx * dx) + (vn - 2.0 * vc + vs) / (dy * dy);
            const double rhs = vc + dt * (-(ubar * dvdx + vc * dvdy) + nu * lap + gy);
            vstar[vid(i, j)] = rhs / drag_div;
        }
    }
    // zero-gradient provisional velocity through open boundary faces
    for (int j = 0; j < ny; ++j) {
        if (is_open(grid.at(0, j))) ustar[uid(0, j)] = ustar[uid(1, j)];
        if (is_open(grid.at(nx - 1, j))) ustar[uid(nx, j)] = ustar[uid(nx - 1, j)];
    }
    for (int i = 0; i < nx; ++i) {
        if (is_open(grid.at(i, 0))) vstar[vid(i, 0)] = vstar[vid(i, 1)];
        if (is_open(grid.at(i, ny - 1))) vstar[vid(i, ny)] = vstar[vid(i, ny - 1)];
    }
}

PressureSolver::PressureSolver(const FluidGrid& grid) : grid_(grid) {
    const std::size_t n = grid.fluid_cells.size();
    for (auto& nb : nb_) nb.assign(n, -1);
    diag_.assign(n, 0.0);
    const double cx = 1.0 / (grid.dx * grid.dx);
    const double cy = 1.0 / (grid.dy * grid.dy);

    for (std::size_t c = 0; c < n; ++c) {
        const int lin = grid.fluid_cells[c];
        const int i = lin % grid.nx, j = lin / grid.nx;
        const bool open = is_open(grid.at(i, j));
        const int di[4] = {-1, 1, 0, 0};
        const int dj[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            const int in = i + di[k], jn = j + dj[k];
            const double w = (k < 2) ? cx : cy;
            if (in < 0 || jn < 0 || in >= grid.nx || jn >= grid.ny) {
                // outside the box: Dirichlet ghost (p_ghost = -p) through open cells,
                // Neumann wall otherwise
                if (open) diag_[c] += 2.0 * w;
                continue;
            }
            if (!is_wet(grid.at(in, jn))) continue; // Neumann wall
            nb_[k][c] = grid.cell_index[grid.id(in, jn)];
            diag_[c] += w;
        }
        has_open_ |= open;
    }
    r_.assign(n, 0.0);
    z_.assign(n, 0.0);
    d_.assign(n, 0.0);
    q_.assign(n, 0.0);
    x_.assign(n, 0.0);
}

void PressureSolver::scatter_to(std::vector<double>& p) const {
    for (std::size_t c = 0; c < x_.size(); ++c)
        p[static_cast<std::size_t>(grid_.fluid_cells[c])] = x_[c];
}

void PressureSolver::apply(const std::vector<double>& x, std::vector<double>& out) const {
    const std::size_t n = x.size();
    const double cx = 1.0 / (grid_.dx * grid_.dx);
    const double cy = 1.0 / (grid_.dy * grid_.dy);
    for (std::size_t c = 0; c < n; ++c) {
        double s = diag_[c] * x[c];
        if (nb_[0][c] >= 0) s -= cx * x[static_cast<std::size_t>(nb_[0][c])];
        if (nb_[1][c] >= 0) s -= cx * x[static_cast<std::size_t>(nb_[1][c])];
        if (nb_[2][c] >= 0) s -= cy * x[static_cast<std::size_t>(nb_[2][c])];
        if (nb_[3][c] >= 0) s -= cy * x[static_cast<std::size_t>(nb_[3][c])];
        out[c] = s;
    }
}

int PressureSolver::solve(const std::vector<double>& rhs, std::vector<double>& p, double rel_tol,
                          double abs_inf) {
    const std::size_t n = diag_.size();
    double bnorm2 = 0.0, bmax = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        bnorm2 += rhs[c] * rhs[c];
        bmax = std::max(bmax, std::fabs(rhs[c]));
    }
    if (bmax == 0.0) {
        for (std::size_t c = 0; c < n; ++c) x_[c] = 0.0;
        scatter_to(p);
        return 0;
    }
    const double bnorm = std::sqrt(bnorm2);

    // warm start from the incoming p
    for (std::size_t c = 0; c < n; ++c)
        x_[c] = p[static_cast<std::size_t>(grid_.fluid_cells[c])];

    apply(x_, q_);
    double rmax = 0.0, rnorm2 = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        r_[c] = rhs[c] - q_[c];
        rnorm2 += r_[c] * r_[c];
        rmax = std::max(rmax, std::fabs(r_[c]));
    }
    double rho_prev = 0.0;
    const int max_iters = std::max<int>(2000, static_cast<int>(10 * n));
    std::deque<double> tail;
    int it = 0;
    while (!(std::sqrt(rnorm2) <= rel_tol * bnorm && rmax <= abs_inf)) {
        if (it >= max_iters) {
            std::ostringstream msg;
            msg << "pressure solve: CG failed to converge in " << max_iters
                << " iterations; |r|2/|b|2 = " << std::sqrt(rnorm2) / bnorm << ", |r|inf = " << rmax
                << ", residual tail:";
            for (double t : tail) msg << ' ' << t;
            throw NumericalError(msg.str());
        }
        double rho = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            z_[c] = r_[c] / diag_[c];
            rho += r_[c] * z_[c];
        }
        if (it == 0) {
            d_ = z_;
        } else {
            const double beta = rho / rho_prev;
            for (std::size_t c = 0; c < n; ++c) d_[c] = z_[c] + beta * d_[c];
        }
        apply(d_, q_);
        double dq = 0.0;
        for (std::size_t c = 0; c < n; ++c) dq += d_[c] * q_[c];
        if (!(dq > 0.0))
            throw NumericalError("pressure solve: CG breakdown (non-positive curvature); "
                                 "is the mask closed with a net source?");
        const double alpha = rho / dq;
        rnorm2 = 0.0;
        rmax = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            x_[c] += alpha * d_[c];
            r_[c] -= alpha * q_[c];
            rnorm2 += r_[c] * r_[c];
            rmax = std::max(rmax, std::fabs(r_[c]));
        }
        rho_prev = rho;
        ++it;
        tail.push_back(std::sqrt(rnorm2));
        if (tail.size() > 10) tail.pop_front();
    }
    scatter_to(p);
    return it;
}

int pressure_solve(PressureSolver& solver, const std::vector<double>& ustar,
                   const std::vector<double>& vstar, const std::vector<double>& source,
                   const FluidProps& props, double dt, std::vector<double>& p,
                   double extra_tighten) {
    const FluidGrid& grid = solver.grid();
    const int nx = grid.nx;
    const double dx = grid.dx, dy = grid.dy;
    const std::size_t n = grid.fluid_cells.size();

    std::vector<double> rhs(n, 0.0);
    const double rho_dt = props.density / dt;
    double net = 0.0, gross = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const int lin = grid.fluid_cells[c];
        const int i = lin % nx, j = lin / nx;
        const double div = (ustar[static_cast<std::size_t>(j) * (nx + 1) + i + 1] -
                            ustar[static_cast<std::size_t>(j) * (nx + 1) + i]) / dx +
                           (vstar[static_cast<std::size_t>(j + 1) * nx + i] -
                            vstar[static_cast<std::size_t>(j) * nx + i]) / dy;
        const double resid = div - source[static_cast<std::size_t>(lin)];
        rhs[c] = -rho_dt * resid;
        net += resid;
        gross += std::fabs(resid);
    }
    if (!solver.has_open_boundary() && std::fabs(net) > 1e-12 * std::max(gross, 1e-300))
        throw NumericalError("pressure solve: closed mask cannot absorb a net source "
                             "(div u* - S sums to " + std::to_string(net) + " 1/s); "
                             "open an INLET/OUTLET or balance the source");

    double smax = 0.0;
    for (int lin : grid.chamber_cells) smax = std::max(smax, std::fabs(source[static_cast<std::size_t>(lin)]));
    const double uscale = std::max({max_face_speed(ustar, vstar), dx * smax, 1e-300});
    const double abs_inf = 0.5 * extra_tighten * rho_dt * 1e-8 * uscale / std::min(dx, dy);
    return solver.solve(rhs, p, 1e-9, abs_inf);
}

void project(const std::vector<double>& ustar, const std::vector<double>& vstar,
             const std::vector<double>& p, const FluidGrid& grid, const FluidProps& props, double dt,
             std::vector<double>& u, std::vector<double>& v) {
    const int nx = grid.nx, ny = grid.ny;
    const double cdx = dt / (props.density * grid.dx);
    const double cdy = dt / (props.density * grid.dy);
    u = ustar;
    v = vstar;
    auto pc = [&](int i, int j) { return p[static_cast<std::size_t>(j) * nx + i]; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            if (!grid.u_face_active(i, j)) continue;
            double grad;
            if (i == 0)
                grad = 2.0 * pc(0, j); // ghost -p across the open face
            else if (i == nx)
                grad = -2.0 * pc(nx - 1, j);
            else
                grad = pc(i, j) - pc(i - 1, j);
            u[static_cast<std::size_t>(j) * (nx + 1) + i] -= cdx * grad;
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!grid.v_face_active(i, j)) continue;
            double grad;
            if (j == 0)
                grad = 2.0 * pc(i, 0);
            else if (j == ny)
                grad = -2.0 * pc(i, ny - 1);
            else
                grad = pc(i, j) - pc(i, j - 1);
            v[static_cast<std::size_t>(j) * nx + i] -= cdy * grad;
        }
    }
}

double max_divergence_residual(const std::vector<double>& u, const std::vector<double>& v,
                               const std::vector<double>& source, const FluidGrid& grid) {
    const int nx = grid.nx;
    double worst = 0.0;
    for (int lin : grid.fluid_cells) {
        const int i = lin % nx, j = lin / nx;
        const double div = (u[static_cast<std::size_t>(j) * (nx + 1) + i + 1] -
                            u[static_cast<std::size_t>(j) * (nx + 1) + i]) / grid.dx +
                           (v[static_cast<std::size_t>(j + 1) * nx + i] -
                            v[static_cast<std::size_t>(j) * nx + i]) / grid.dy;
        worst = std::max(worst, std::fabs(div - source[static_cast<std::size_t>(lin)]));
    }
    return worst;
}

BoundaryFlux boundary_fluxes(const FlowState& state, const FluidGrid& grid, double depth) {
    BoundaryFlux out;
    const int nx = grid.nx, ny = grid.ny;
    for (int lin : grid.fluid_cells) {
        const int i = lin % nx, j = lin / nx;
        const Cell c = grid.mask[static_cast<std::size_t>(lin)];
        if (!is_open(c)) continue;
        double q = 0.0;
        if (i == 0) q -= state.u[state.uid(0, j)] * grid.dy;
        if (i == nx - 1) q += state.u[state.uid(nx, j)] * grid.dy;
        if (j == 0) q -= state.v[state.vid(i, 0)] * grid.dx;
        if (j == ny - 1) q += state.v[state.vid(i, ny)] * grid.dx;
        q *= depth;
        if (c == Cell::Inlet)
            out.inlet_outward += q;
        else
            out.outlet_outward += q;
    }
    return out;
}

double outlet_flux(const FlowState& state, const FluidGrid& grid, double depth) {
    return boundary_fluxes(state, grid, depth).outlet_outward;
}

double source_volume_rate(const std::vector<double>& source, const FluidGrid& grid, double depth) {
    double s = 0.0;
    for (int lin : grid.chamber_cells) s += source[static_cast<std::size_t>(lin)];
    return s * grid.dx * grid.dy * depth;
}

} // namespace micropump::fluid
