#include "micropump/plate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "micropump/errors.hpp"
#include "micropump/linalg.hpp"

namespace micropump::plate {

namespace {

constexpr double kPi = std::numbers::pi;

// 7-point Gauss-Legendre on [0,1]
constexpr int kGauss = 7;
constexpr double kGx[kGauss] = {0.0254460438286207, 0.1292344072003028, 0.2970774243113014,
                                0.5000000000000000, 0.7029225756886985, 0.8707655927996972,
                                0.9745539561713793};
constexpr double kGw[kGauss] = {0.0647424830844348, 0.1398526957446383, 0.1909150252525595,
                                0.2089795918367347, 0.1909150252525595, 0.1398526957446383,
                                0.0647424830844348};

struct HermiteVals {
    double h[4];   // value
    double d1[4];  // d/dr
    double d2[4];  // d2/dr2
};

HermiteVals hermite(double xi, double le) {
    HermiteVals v;
    double xi2 = xi * xi, xi3 = xi2 * xi;
    v.h[0] = 1.0 - 3.0 * xi2 + 2.0 * xi3;
    v.h[1] = le * (xi - 2.0 * xi2 + xi3);
    v.h[2] = 3.0 * xi2 - 2.0 * xi3;
    v.h[3] = le * (-xi2 + xi3);
    v.d1[0] = (-6.0 * xi + 6.0 * xi2) / le;
    v.d1[1] = 1.0 - 4.0 * xi + 3.0 * xi2;
    v.d1[2] = (6.0 * xi - 6.0 * xi2) / le;
    v.d1[3] = -2.0 * xi + 3.0 * xi2;
    v.d2[0] = (-6.0 + 12.0 * xi) / (le * le);
    v.d2[1] = (-4.0 + 6.0 * xi) / le;
    v.d2[2] = (6.0 - 12.0 * xi) / (le * le);
    v.d2[3] = (-2.0 + 6.0 * xi) / le;
    return v;
}

double angular_norm(int n) { return n == 0 ? 2.0 * kPi : kPi; }

// Cosine edge taper of the drive moment: 1 inside, smooth to 0 at r = a.
double taper_value(double r, double a, double w) {
    if (r <= a - w) return 1.0;
    if (r >= a) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (r - (a - w)) / w));
}

double taper_slope(double r, double a, double w) {
    if (r <= a - w || r >= a) return 0.0;
    return -0.5 * kPi / w * std::sin(kPi * (r - (a - w)) / w);
}

} // namespace

void PlateModel::validate() const {
    IssueList issues;
    if (!(radius > 0.0)) issues.add("plate: radius must be > 0");
    if (!(damping_zeta >= 0.0 && damping_zeta < 1.0)) issues.add("plate: zeta must be in [0, 1)");
    if (!(constants.bending_stiffness_D > 0.0)) issues.add("plate: bending stiffness must be > 0");
    if (!(constants.areal_mass > 0.0)) issues.add("plate: areal mass must be > 0");
    issues.throw_if_any();
}

void Mode::eval_radial(double r, double& value, double& slope) const {
    value = 0.0;
    slope = 0.0;
    if (r >= radius || node_r.size() < 2) return;
    if (r < 0.0) r = 0.0;
    const std::size_t elements = node_r.size() - 1;
    const double le = radius / static_cast<double>(elements);
    std::size_t e = std::min(static_cast<std::size_t>(r / le), elements - 1);
    double xi = (r - node_r[e]) / le;
    HermiteVals hv = hermite(xi, le);
    const double dof[4] = {node_value[e], node_slope[e], node_value[e + 1], node_slope[e + 1]};
    for (int i = 0; i < 4; ++i) {
        value += hv.h[i] * dof[i];
        slope += hv.d1[i] * dof[i];
    }
}

double Mode::radial_value(double r) const {
    double v, s;
    eval_radial(r, v, s);
    return v;
}

double Mode::radial_curvature(double r) const {
    if (r >= radius || node_r.size() < 2) return 0.0;
    if (r < 0.0) r = 0.0;
    const std::size_t elements = node_r.size() - 1;
    const double le = radius / static_cast<double>(elements);
    std::size_t e = std::min(static_cast<std::size_t>(r / le), elements - 1);
    double xi = (r - node_r[e]) / le;
    HermiteVals hv = hermite(xi, le);
    const double dof[4] = {node_value[e], node_slope[e], node_value[e + 1], node_slope[e + 1]};
    double c = 0.0;
    for (int i = 0; i < 4; ++i) c += hv.d2[i] * dof[i];
    return c;
}

double Mode::shape(double r, double theta) const {
    double v = radial_value(r);
    if (n == 0) return v;
    return angular == Angular::Cos ? v * std::cos(n * theta) : v * std::sin(n * theta);
}

std::vector<Mode> radial_eigensolve(const PlateModel& model, int n, int num_modes, int elements,
                                    Angular angular) {
    model.validate();
    if (n < 0) throw ValidationError("radial_eigensolve: n must be >= 0");
    if (elements < 8) throw ValidationError("radial_eigensolve: need at least 8 elements");
    if (num_modes < 1 || num_modes > elements)
        throw ValidationError("radial_eigensolve: num_modes must be in [1, elements]");

    const double a = model.radius;
    const double le = a / elements;
    const double bigD = model.constants.bending_stiffness_D;
    const double rho_h = model.constants.areal_mass;
    const std::size_t ndof = 2 * (elements + 1);

    linalg::Matrix kmat(ndof, ndof), mmat(ndof, ndof);
    for (int e = 0; e < elements; ++e) {
        const double r0 = e * le;
        const std::size_t base = 2 * static_cast<std::size_t>(e);
        for (int g = 0; g < kGauss; ++g) {
            const double xi = kGx[g];
            const double r = r0 + xi * le;
            const double wgt = kGw[g] * le * r;
            HermiteVals hv = hermite(xi, le);
            double lop[4];
            const double inv_r = 1.0 / r;
            const double nn = static_cast<double>(n) * n;
            for (int i = 0; i < 4; ++i)
                lop[i] = hv.d2[i] + hv.d1[i] * inv_r - nn * hv.h[i] * inv_r * inv_r;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    kmat(base + i, base + j) += wgt * bigD * lop[i] * lop[j];
                    mmat(base + i, base + j) += wgt * rho_h * hv.h[i] * hv.h[j];
                }
            }
        }
    }

    // constraints: clamped edge, regularity at the center by harmonic
    std::vector<bool> fixed(ndof, false);
    fixed[ndof - 2] = fixed[ndof - 1] = true; // R(a) = R'(a) = 0
    if (n == 0) {
        fixed[1] = true; // R'(0) = 0
    } else if (n == 1) {
        fixed[0] = true; // R(0) = 0
    } else {
        fixed[0] = fixed[1] = true;
    }

    std::vector<std::size_t> keep;
    keep.reserve(ndof);
    for (std::size_t i = 0; i < ndof; ++i)
        if (!fixed[i]) keep.push_back(i);

    const std::size_t nred = keep.size();
    linalg::Matrix kr(nred, nred), mr(nred, nred);
    for (std::size_t i = 0; i < nred; ++i)
        for (std::size_t j = 0; j < nred; ++j) {
            kr(i, j) = kmat(keep[i], keep[j]);
            mr(i, j) = mmat(keep[i], keep[j]);
        }

    linalg::EigenResult eig;
    try {
        eig = linalg::eigen_symmetric_generalized(kr, mr);
    } catch (const NumericalError& err) {
        throw NumericalError(std::string("radial_eigensolve: mass matrix not positive definite "
                                         "(mesh or constraint bug): ") +
                             err.what());
    }

    const double cn = angular_norm(n);
    std::vector<Mode> out;
    out.reserve(num_modes);
    for (int k = 0; k < num_modes; ++k) {
        double lam = eig.values[static_cast<std::size_t>(k)];
        if (!(lam > 0.0))
            throw NumericalError("radial_eigensolve: nonpositive eigenvalue " + std::to_string(lam) +
                                 " for harmonic n=" + std::to_string(n));
        Mode mode;
        mode.n = n;
        mode.radial_order = k + 1;
        mode.omega = std::sqrt(lam);
        mode.zeta = model.damping_zeta;
        mode.angular = angular;
        mode.radius = a;
        mode.node_r.resize(elements + 1);
        mode.node_value.assign(elements + 1, 0.0);
        mode.node_slope.assign(elements + 1, 0.0);
        for (int i = 0; i <= elements; ++i) mode.node_r[i] = i * le;

        // expand reduced eigenvector, fold the angular mass factor into R
        const double scale = 1.0 / std::sqrt(cn);
        for (std::size_t i = 0; i < nred; ++i) {
            double v = eig.vectors(i, static_cast<std::size_t>(k)) * scale;
            std::size_t g = keep[i];
            if (g % 2 == 0)
                mode.node_value[g / 2] = v;
            else
                mode.node_slope[g / 2] = v;
        }
        // sign convention: positive at the first free sample point
        double probe = mode.radial_value(0.25 * a);
        if (probe < 0.0) {
            for (auto& v : mode.node_value) v = -v;
            for (auto& v : mode.node_slope) v = -v;
        }

        // independent mass-norm check: composite Simpson with 8 panels/element
        double norm = 0.0;
        const int sub = 8;
        for (int e = 0; e < elements; ++e) {
            double h = le / sub;
            for (int ssub = 0; ssub < sub; ++ssub) {
                double ra = e * le + ssub * h;
                double rm = ra + 0.5 * h;
                double rb = ra + h;
                auto f = [&](double r) {
                    double v = mode.radial_value(std::min(r, a * (1.0 - 1e-15)));
                    return rho_h * v * v * r;
                };
                norm += h / 6.0 * (f(ra) + 4.0 * f(rm) + f(rb));
            }
        }
        mode.norm_residual = std::fabs(cn * norm - 1.0);
        mode.modal_mass = 1.0;
        out.push_back(std::move(mode));
    }
    return out;
}

double piezo_force_per_volt(const PlateModel& model, const Mode& mode) {
    if (mode.n != 0) return 0.0;
    const double a = model.radius;
    const double w = model.taper();
    const double mpv = model.constants.piezo_moment_per_volt;
    const std::size_t elements = mode.node_r.size() - 1;
    const double le = a / static_cast<double>(elements);

    // f/V = Mpv * int_A T lap(phi) dA = -Mpv * 2 pi * int T'(r) R'(r) r dr
    double integral = 0.0;
    for (std::size_t e = 0; e < elements; ++e) {
        double r0 = static_cast<double>(e) * le, r1 = r0 + le;
        double lo = std::max(r0, a - w), hi = std::min(r1, a);
        if (hi <= lo) continue;
        for (int g = 0; g < kGauss; ++g) {
            double r = lo + kGx[g] * (hi - lo);
            double v, s;
            mode.eval_radial(r, v, s);
            integral += kGw[g] * (hi - lo) * taper_slope(r, a, w) * s * r;
        }
    }
    return -mpv * 2.0 * kPi * integral;
}

double piezo_force_per_volt_area(const PlateModel& model, const Mode& mode, int subdiv) {
    if (mode.n != 0) return 0.0;
    if (subdiv < 1) subdiv = 1;
    const double a = model.radius;
    const double w = model.taper();
    const double mpv = model.constants.piezo_moment_per_volt;
    const std::size_t elements = mode.node_r.size() - 1;
    const double le = a / static_cast<double>(elements);

    double integral = 0.0;
    for (std::size_t e = 0; e < elements; ++e) {
        for (int ssub = 0; ssub < subdiv; ++ssub) {
            double lo = static_cast<double>(e) * le + ssub * le / subdiv;
            double hi = lo + le / subdiv;
            for (int g = 0; g < kGauss; ++g) {
                double r = lo + kGx[g] * (hi - lo);
                double v, s;
                mode.eval_radial(r, v, s);
                double lap = mode.radial_curvature(r) + s / r;
                integral += kGw[g] * (hi - lo) * taper_value(r, a, w) * lap * r;
            }
        }
    }
    return mpv * 2.0 * kPi * integral;
}

void modal_step(ModalState& state, const std::vector<Mode>& modes, const std::vector<double>& forces,
                double dt) {
    if (!(dt > 0.0)) throw ValidationError("modal_step: dt must be > 0");
    const std::size_t n = modes.size();
    if (state.q.size() != n || forces.size() != n)
        throw ValidationError("modal_step: state/force size mismatch");

    constexpr double gamma = 0.5, beta = 0.25;
    for (std::size_t k = 0; k < n; ++k) {
        const double om = modes[k].omega, ze = modes[k].zeta;
        const double qs = state.q[k] + dt * state.qdot[k] + dt * dt * (0.5 - beta) * state.qddot[k];
        const double vs = state.qdot[k] + dt * (1.0 - gamma) * state.qddot[k];
        const double denom = 1.0 + 2.0 * ze * om * gamma * dt + om * om * beta * dt * dt;
        const double acc = (forces[k] - 2.0 * ze * om * vs - om * om * qs) / denom;
        state.q[k] = qs + beta * dt * dt * acc;
        state.qdot[k] = vs + gamma * dt * acc;
        state.qddot[k] = acc;
    }
    state.time += dt;
}

double deflection_at(const std::vector<Mode>& modes, const std::vector<double>& q, double r,
                     double theta) {
    double w = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) w += q[k] * modes[k].shape(r, theta);
    return w;
}

double coupled_frequency_estimate(const Mode& mode, double fluid_density, double depth,
                                  double port_length, double port_width) {
    if (mode.n != 0) throw ValidationError("coupled_frequency_estimate: needs an n=0 mode");
    const double a = mode.radius;
    const int ns = 8192;
    const double dr = a / ns;

    // cumulative volume integral and squeeze-flow kinetic energy
    double cum = 0.0, m_int = 0.0, flux = 0.0;
    for (int i = 0; i < ns; ++i) {
        double rl = i * dr, rr = rl + dr;
        double fl = mode.radial_value(rl) * rl, fr = mode.radial_value(rr) * rr;
        double add = 0.5 * (fl + fr) * dr;
        double cum_mid = cum + 0.5 * add;
        double rm = 0.5 * (rl + rr);
        m_int += (cum_mid * cum_mid / rm) * dr;
        cum += add;
    }
    flux = 2.0 * kPi * cum; // int phi dA
    m_int *= 2.0 * kPi * fluid_density / depth;

    // two identical rectangular ports in parallel
    double inertance = fluid_density * port_length / (port_width * depth);
    double m_port = 0.5 * inertance * flux * flux;

    double omega_wet = mode.omega / std::sqrt(1.0 + m_int + m_port);
    return omega_wet / (2.0 * kPi);
}

} // namespace micropump::plate
