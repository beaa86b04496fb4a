#pragma once

namespace micropump::bessel {

/// J_n(x) by direct power series. Accurate to ~1e-11 relative for x <= ~16,
/// which covers every characteristic root this project needs.
double bessel_j(int n, double x);

/// I_n(x) by power series (all-positive terms, no cancellation).
double bessel_i(int n, double x);

/// lambda^2 for the clamped circular plate: lambda is the s-th positive root of
///   J_n(x) I_{n+1}(x) + I_n(x) J_{n+1}(x) = 0,
/// located by a sign-change scan and bracketed bisection to 1e-10 relative.
/// Serves as the independent oracle for the radial FEM eigensolver.
/// Throws NumericalError (reporting the scanned interval) if the scan fails.
double clamped_plate_lambda2(int n, int s);

} // namespace micropump::bessel
