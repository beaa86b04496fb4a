#include "micropump/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "micropump/errors.hpp"

namespace micropump::coupling {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

bool all_finite(const std::vector<double>& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

void DriveSignal::validate() const {
    IssueList issues;
    if (!(amplitude >= 0.0)) issues.add("drive: amplitude must be >= 0");
    if (!(frequency > 0.0)) issues.add("drive: frequency must be > 0");
    issues.throw_if_any();
}

double DriveSignal::voltage(double t, double ramp_cycles) const {
    double ramp = 1.0;
    const double t_ramp = ramp_cycles * period();
    if (ramp_cycles > 0.0 && t < t_ramp) ramp = 0.5 * (1.0 - std::cos(kPi * t / t_ramp));
    return amplitude * ramp * std::sin(2.0 * kPi * frequency * t + phase);
}

void CouplingConfig::validate() const {
    IssueList issues;
    if (!(dt >= 0.0)) issues.add("coupling: dt must be >= 0 (0 = period/steps_per_cycle)");
    if (steps_per_cycle < 8) issues.add("coupling: steps_per_cycle must be >= 8");
    if (subiterations_max < 1) issues.add("coupling: subiterations_max must be >= 1");
    if (!(relaxation_omega0 > 0.0 && relaxation_omega0 <= 1.0))
        issues.add("coupling: relaxation_omega0 must be in (0, 1]");
    if (!(interface_tolerance > 0.0)) issues.add("coupling: interface_tolerance must be > 0");
    if (cycles_total < 1) issues.add("coupling: cycles_total must be >= 1");
    if (cycles_averaged < 1 || cycles_averaged > cycles_total)
        issues.add("coupling: cycles_averaged must be in [1, cycles_total]");
    if (!(ramp_cycles >= 0.0)) issues.add("coupling: ramp_cycles must be >= 0");
    issues.throw_if_any();
}

InterfaceCache InterfaceCache::build(const std::vector<plate::Mode>& modes,
                                     const fluid::FluidGrid& grid) {
    InterfaceCache cache;
    const std::size_t nc = grid.chamber_cells.size();
    const double da = grid.dx * grid.dy;
    cache.phi.resize(modes.size());
    cache.phi_center.resize(modes.size());
    cache.phi_cell_sum.resize(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
        auto& row = cache.phi[k];
        row.resize(nc);
        double sum = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            row[c] = modes[k].shape(grid.chamber_r[c], grid.chamber_theta[c]);
            sum += row[c];
        }
        cache.phi_center[k] = modes[k].shape(0.0, 0.0);
        cache.phi_cell_sum[k] = sum * da;
    }
    return cache;
}

std::vector<double> pressure_to_modal_forces(const std::vector<double>& p, const fluid::FluidGrid& grid,
                                             const std::vector<plate::Mode>& modes) {
    const double da = grid.dx * grid.dy;
    std::vector<double> f(modes.size(), 0.0);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < grid.chamber_cells.size(); ++c) {
            const auto lin = static_cast<std::size_t>(grid.chamber_cells[c]);
            s += p[lin] * modes[k].shape(grid.chamber_r[c], grid.chamber_theta[c]);
        }
        f[k] = s * da;
    }
    return f;
}

std::vector<double> membrane_source(const std::vector<plate::Mode>& modes,
                                    const plate::ModalState& state, const fluid::FluidGrid& grid,
                                    double depth) {
    std::vector<double> source(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
    for (std::size_t c = 0; c < grid.chamber_cells.size(); ++c) {
        double wdot = 0.0;
        for (std::size_t k = 0; k < modes.size(); ++k)
            wdot += state.qdot[k] * modes[k].shape(grid.chamber_r[c], grid.chamber_theta[c]);
        source[static_cast<std::size_t>(grid.chamber_cells[c])] = -wdot / depth;
    }
    return source;
}

std::pair<double, double> mode_centroid(const std::vector<double>& w, const fluid::FluidGrid& grid) {
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t c = 0; c < grid.chamber_cells.size(); ++c) {
        const double a = std::fabs(w[c]);
        sw += a;
        sx += a * grid.chamber_x[c];
        sy += a * grid.chamber_y[c];
    }
    if (sw <= 0.0) return {0.0, 0.0}; // chamber center by convention
    return {sx / sw, sy / sw};
}

HarmonicFit fit_harmonic(std::span<const double> t, std::span<const double> w, double omega,
                         double phase0) {
    double sss = 0.0, scc = 0.0, ssc = 0.0, ss1 = 0.0, sc1 = 0.0;
    double sws = 0.0, swc = 0.0, sw1 = 0.0;
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double s = std::sin(omega * t[i] + phase0);
        const double c = std::cos(omega * t[i] + phase0);
        sss += s * s;
        scc += c * c;
        ssc += s * c;
        ss1 += s;
        sc1 += c;
        sws += w[i] * s;
        swc += w[i] * c;
        sw1 += w[i];
    }
    // 3x3 normal equations, Gaussian elimination
    double m[3][4] = {{sss, ssc, ss1, sws}, {ssc, scc, sc1, swc}, {ss1, sc1, n, sw1}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        std::swap(m[piv], m[col]);
        if (std::fabs(m[col][col]) < 1e-300) return {}; // degenerate sample set
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    const double a = m[0][3] / m[0][0];
    const double b = m[1][3] / m[1][1];
    HarmonicFit fit;
    fit.offset = m[2][3] / m[2][2];
    fit.amplitude = std::hypot(a, b);
    fit.phase_lag = (fit.amplitude > 0.0) ? std::atan2(-b, a) : 0.0;
    if (fit.phase_lag < -0.5 * kPi) fit.phase_lag += 2.0 * kPi; // keep in [-pi/2, 3pi/2)
    return fit;
}

CoupledSim::CoupledSim(const std::vector<plate::Mode>& modes,
                       const std::vector<double>& piezo_force_per_volt, const fluid::FluidGrid& grid,
                       const fluid::FluidProps& props, double depth, DriveSignal drive,
                       CouplingConfig config)
    : modes_(modes), piezo_per_volt_(piezo_force_per_volt), grid_(grid), props_(props), depth_(depth),
      drive_(drive), cfg_(config), cache_(InterfaceCache::build(modes, grid)),
      plate_state_(modes.size()), flow_(grid), solver_(grid) {
    drive_.validate();
    cfg_.validate();
    props_.validate();
    if (piezo_per_volt_.size() != modes_.size())
        throw ValidationError("coupled sim: piezo coefficient count must match mode count");

    const double period = drive_.period();
    if (cfg_.dt > 0.0) {
        spc_ = std::max(1, static_cast<int>(std::lround(period / cfg_.dt)));
        dt_ = period / spc_;
    } else {
        spc_ = cfg_.steps_per_cycle;
        dt_ = period / spc_;
    }
    f_pressure_.assign(modes_.size(), 0.0);
    source_.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
    wfield_.assign(grid.chamber_cells.size(), 0.0);
}

void CoupledSim::fluid_substep(const std::vector<double>& interface_qdot,
                               std::vector<double>& forces_out, double tighten) {
    const double da = grid_.dx * grid_.dy;
    for (std::size_t c = 0; c < grid_.chamber_cells.size(); ++c) {
        double wdot = 0.0;
        for (std::size_t k = 0; k < modes_.size(); ++k) wdot += interface_qdot[k] * cache_.phi[k][c];
        source_[static_cast<std::size_t>(grid_.chamber_cells[c])] = -wdot / depth_;
    }
    diag_.cg_iterations +=
        fluid::pressure_solve(solver_, ustar_, vstar_, source_, props_, dt_, flow_.p, tighten);
    fluid::project(ustar_, vstar_, flow_.p, grid_, props_, dt_, unew_, vnew_);
    forces_out.assign(modes_.size(), 0.0);
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        double s = 0.0;
        const auto& row = cache_.phi[k];
        for (std::size_t c = 0; c < grid_.chamber_cells.size(); ++c)
            s += flow_.p[static_cast<std::size_t>(grid_.chamber_cells[c])] * row[c];
        forces_out[k] = s * da;
    }
}

double CoupledSim::scaled_divergence_residual() const {
    const double div_resid = fluid::max_divergence_residual(unew_, vnew_, source_, grid_);
    if (div_resid <= 0.0) return 0.0;
    const double dmin = std::min(grid_.dx, grid_.dy);
    double ref = fluid::max_face_speed(unew_, vnew_) / dmin;
    if (ref <= 0.0) {
        double smax = 0.0;
        for (int lin : grid_.chamber_cells)
            smax = std::max(smax, std::fabs(source_[static_cast<std::size_t>(lin)]));
        ref = std::max(smax, 1e-300);
    }
    return div_resid / ref;
}

double CoupledSim::chamber_deflection_stats(double& max_abs_w) {
    double sum = 0.0;
    max_abs_w = 0.0;
    for (std::size_t c = 0; c < grid_.chamber_cells.size(); ++c) {
        double w = 0.0;
        for (std::size_t k = 0; k < modes_.size(); ++k) w += plate_state_.q[k] * cache_.phi[k][c];
        wfield_[c] = w;
        const double a = std::fabs(w);
        sum += a;
        max_abs_w = std::max(max_abs_w, a);
    }
    return sum;
}

void CoupledSim::step() {
    const double t1 = plate_state_.time + dt_;
    const double volts = drive_.voltage(t1, cfg_.ramp_cycles);

    std::vector<double> f_piezo(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k) f_piezo[k] = piezo_per_volt_[k] * volts;

    fluid::momentum_predict(flow_, grid_, props_, depth_, dt_, 0.0, 0.0, ustar_, vstar_);

    std::vector<double> f_cur = f_pressure_;
    std::vector<double> x_prev = plate_state_.qdot;
    std::vector<double> r_prev, forces(modes_.size()), x_it(modes_.size());
    plate::ModalState accepted = plate_state_;
    double omega = cfg_.relaxation_omega0;
    double r_first = 0.0;
    int it = 0;
    bool converged = false;

    while (it < cfg_.subiterations_max) {
        ++it;
        plate::ModalState trial = plate_state_;
        for (std::size_t k = 0; k < modes_.size(); ++k) forces[k] = f_piezo[k] + f_cur[k];
        plate::modal_step(trial, modes_, forces, dt_);

        std::vector<double> r(modes_.size());
        for (std::size_t k = 0; k < modes_.size(); ++k) r[k] = trial.qdot[k] - x_prev[k];
        const double rn = norm2(r);
        if (!all_finite(r))
            throw NumericalError("coupled step: sub-iteration produced non-finite state; reduce dt");
        if (it == 1) {
            r_first = std::max(rn, 1e-300);
            if (cfg_.subiterations_max == 1) {
                x_it = trial.qdot; // plain staggered scheme
            } else {
                for (std::size_t k = 0; k < modes_.size(); ++k)
                    x_it[k] = x_prev[k] + cfg_.relaxation_omega0 * r[k];
            }
        } else {
            if (rn > 1e3 * r_first)
                throw NumericalError("coupled step: sub-iterations diverging (interface residual grew " +
                                     std::to_string(rn / r_first) + "x); reduce dt");
            // Aitken delta^2 on the interface velocity residuals
            double num = 0.0, den = 0.0;
            for (std::size_t k = 0; k < modes_.size(); ++k) {
                const double dr = r[k] - r_prev[k];
                num += r_prev[k] * dr;
                den += dr * dr;
            }
            if (den > 0.0) omega = -omega * num / den;
            omega = std::clamp(omega, 1e-6, 1.0);
            for (std::size_t k = 0; k < modes_.size(); ++k) x_it[k] = x_prev[k] + omega * r[k];
        }

        fluid_substep(x_it, f_cur);
        accepted = trial;

        double change = 0.0;
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            const double d = x_it[k] - x_prev[k];
            change += d * d;
        }
        change = std::sqrt(change);
        const double scale = std::max(norm2(x_it), 1e-300);
        r_prev = r;
        x_prev = x_it;
        if (cfg_.subiterations_max == 1 || change <= cfg_.interface_tolerance * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        ++diag_.unconverged_steps;
        std::fprintf(stderr,
                     "[micropump] warning: interface sub-iterations not converged at t=%.6e s "
                     "(%d iterations), accepting last iterate\n",
                     t1, it);
    }
    diag_.max_subiterations = std::max(diag_.max_subiterations, it);

    // enforce the post-projection residual bound; rarely the inf target set
    // from |u*| is not tight enough for the projected field, so re-solve with
    // a tighter target instead of failing
    double scaled = scaled_divergence_residual();
    for (double tighten = 0.1; scaled > 1e-8 && tighten >= 1e-4; tighten *= 0.1)
        {
            fluid_substep(x_prev, f_cur, tighten);
            scaled = scaled_divergence_residual();
        }
    if (scaled > 1e-8)
        throw NumericalError("coupled step: post-projection divergence residual " +
                             std::to_string(scaled) + " (scaled) exceeds 1e-8");
    diag_.max_div_residual_scaled = std::max(diag_.max_div_residual_scaled, scaled);

    plate_state_ = accepted;
    flow_.u = unew_;
    flow_.v = vnew_;
    flow_.time = t1;

    const auto flux = fluid::boundary_fluxes(flow_, grid_, depth_);
    const double src_rate = fluid::source_volume_rate(source_, grid_, depth_);
    const double imbalance = std::fabs(flux.inlet_outward + flux.outlet_outward - src_rate);
    const double fscale = std::max({std::fabs(flux.inlet_outward) + std::fabs(flux.outlet_outward),
                                    std::fabs(src_rate), 1e-300});
    const double frel = (imbalance > 0.0) ? imbalance / fscale : 0.0;
    diag_.max_flux_balance_rel = std::max(diag_.max_flux_balance_rel, frel);

    f_pressure_ = f_cur;
    ++step_index_;
    if (snapshot_hook && snapshot_every > 0 && step_index_ % snapshot_every == 0)
        snapshot_hook(step_index_, flow_);
}

CycleResult CoupledSim::run_cycles() {
    diag_ = CycleResult{};
    diag_.frequency_hz = drive_.frequency;
    samples_.clear();
    const int steps = cfg_.cycles_total * spc_;
    samples_.reserve(steps);

    const std::size_t nm = modes_.size();
    const double omega_drive = 2.0 * kPi * drive_.frequency;

    // accumulators over the averaged window / final cycle
    const int win_start = (cfg_.cycles_total - cfg_.cycles_averaged) * spc_;
    const int last_cycle_start = (cfg_.cycles_total - 1) * spc_;
    const int prev_cycle_start = (cfg_.cycles_total - 2) * spc_;
    double flux_sum = 0.0, peak_flux = 0.0, flux_last = 0.0, flux_prev = 0.0;
    std::vector<double> frac_sum(nm, 0.0);
    double cen_w = 0.0, cen_x = 0.0, cen_y = 0.0;

    for (int s = 0; s < steps; ++s) {
        step();

        TimeSample sample;
        sample.t = flow_.time;
        sample.voltage = drive_.voltage(flow_.time, cfg_.ramp_cycles);
        sample.q = plate_state_.q;
        double wc = 0.0;
        for (std::size_t k = 0; k < nm; ++k) wc += plate_state_.q[k] * cache_.phi_center[k];
        sample.w_center = wc;
        sample.q_out = fluid::outlet_flux(flow_, grid_, depth_);
        double pmean = 0.0;
        for (int lin : grid_.chamber_cells) pmean += flow_.p[static_cast<std::size_t>(lin)];
        sample.p_chamber_mean = grid_.chamber_cells.empty() ? 0.0 : pmean / grid_.chamber_cells.size();
        samples_.push_back(std::move(sample));

        double max_abs_w = 0.0;
        const double sum_abs_w = chamber_deflection_stats(max_abs_w);
        diag_.max_abs_deflection_m = std::max(diag_.max_abs_deflection_m, max_abs_w);
        if (!diag_.deflection_warning && max_abs_w > 0.2 * depth_) {
            diag_.deflection_warning = true;
            std::fprintf(stderr,
                         "[micropump] warning: max |W| = %.3e m exceeds 0.2 h = %.3e m; the "
                         "non-deforming-mesh interface linearization is getting stretched\n",
                         max_abs_w, 0.2 * depth_);
        }

        if (s >= win_start) {
            flux_sum += samples_.back().q_out;
            peak_flux = std::max(peak_flux, std::fabs(samples_.back().q_out));
            for (std::size_t k = 0; k < nm; ++k) {
                const double e = plate_state_.q[k] * modes_[k].omega;
                frac_sum[k] += e * e;
            }
        }
        if (s >= last_cycle_start) {
            flux_last += samples_.back().q_out;
            cen_w += sum_abs_w;
            for (std::size_t c = 0; c < grid_.chamber_cells.size(); ++c) {
                const double a = std::fabs(wfield_[c]);
                cen_x += a * grid_.chamber_x[c];
                cen_y += a * grid_.chamber_y[c];
            }
        } else if (s >= prev_cycle_start) {
            flux_prev += samples_.back().q_out;
        }
    }

    const int win_count = cfg_.cycles_averaged * spc_;
    diag_.net_flow_m3s = flux_sum / win_count;
    diag_.net_flow_ul_min = fluid::m3s_to_ul_min(diag_.net_flow_m3s);
    diag_.peak_abs_flux_m3s = peak_flux;

    // phase of the center deflection relative to the drive at its frequency
    std::vector<double> tw(win_count), ww(win_count);
    for (int i = 0; i < win_count; ++i) {
        tw[i] = samples_[static_cast<std::size_t>(win_start + i)].t;
        ww[i] = samples_[static_cast<std::size_t>(win_start + i)].w_center;
    }
    const HarmonicFit fit = fit_harmonic(tw, ww, omega_drive, drive_.phase);
    diag_.phase_lag_rad = fit.phase_lag;
    diag_.w_center_amplitude_m = fit.amplitude;

    double frac_total = 0.0;
    for (double f : frac_sum) frac_total += f;
    diag_.modal_fraction.assign(nm, 0.0);
    if (frac_total > 0.0) {
        for (std::size_t k = 0; k < nm; ++k) diag_.modal_fraction[k] = frac_sum[k] / frac_total;
    } else {
        diag_.zero_response = true;
        for (std::size_t k = 0; k < nm; ++k) diag_.modal_fraction[k] = 1.0 / static_cast<double>(nm);
    }

    if (cen_w > 0.0) {
        diag_.centroid_x = cen_x / cen_w;
        diag_.centroid_y = cen_y / cen_w;
    } // else chamber center (0,0) by convention

    const double m_last = flux_last / spc_;
    const double m_prev = flux_prev / spc_;
    if (cfg_.cycles_total >= 2) {
        const double denom = std::max({std::fabs(m_last), std::fabs(m_prev), 1e-4 * peak_flux, 1e-300});
        diag_.periodicity_residual = std::fabs(m_last - m_prev) / denom;
    }
    diag_.periodic = diag_.periodicity_residual <= 0.05;
    if (!diag_.periodic)
        std::fprintf(stderr,
                     "[micropump] warning: run at %.6g Hz flagged non-periodic "
                     "(last-two-cycle net-flow change %.3g)\n",
                     drive_.frequency, diag_.periodicity_residual);
    return diag_;
}

} // namespace micropump::coupling
