#include "micropump/bessel.hpp"

#include <cmath>
#include <string>

#include "micropump/errors.hpp"

namespace micropump::bessel {

namespace {

double series(int n, double x, bool alternating) {
    // sum_m s^m (x/2)^(n+2m) / (m! (n+m)!),  s = -1 for J, +1 for I
    double half = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k; // (x/2)^n / n!
    double sum = term;
    double q = half * half;
    for (int m = 1; m <= 400; ++m) {
        term *= q / (static_cast<double>(m) * (m + n));
        sum += alternating ? ((m & 1) ? -term : term) : term;
        if (std::fabs(term) < 1e-18 * (std::fabs(sum) + 1e-300) && m > n) break;
    }
    return sum;
}

// Characteristic function, normalized by I_n(x) > 0 so that it stays O(1)
// instead of growing like e^x. Roots are unchanged.
double characteristic(int n, double x) {
    double in = bessel_i(n, x);
    return bessel_j(n, x) * (bessel_i(n + 1, x) / in) + bessel_j(n + 1, x);
}

} // namespace

double bessel_j(int n, double x) {
    if (n < 0) throw ValidationError("bessel_j: order must be >= 0");
    return series(n, x, true);
}

double bessel_i(int n, double x) {
    if (n < 0) throw ValidationError("bessel_i: order must be >= 0");
    return series(n, x, false);
}

double clamped_plate_lambda2(int n, int s) {
    if (n < 0 || s < 1)
        throw ValidationError("clamped_plate_lambda2: need n >= 0, s >= 1");

    const double lo = 0.05, hi = 16.0, step = 0.02;
    int found = 0;
    double prev_x = lo;
    double prev_f = characteristic(n, prev_x);
    for (double x = lo + step; x <= hi + 0.5 * step; x += step) {
        double f = characteristic(n, x);
        if (prev_f == 0.0) {
            ++found;
            if (found == s) return prev_x * prev_x;
        } else if (prev_f * f < 0.0) {
            ++found;
            if (found == s) {
                double a = prev_x, b = x, fa = prev_f;
                while ((b - a) > 1e-10 * a) {
                    double mid = 0.5 * (a + b);
                    double fm = characteristic(n, mid);
                    if (fm == 0.0) { a = b = mid; break; }
                    if (fa * fm < 0.0) {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                }
                double lambda = 0.5 * (a + b);
                return lambda * lambda;
            }
        }
        prev_x = x;
        prev_f = f;
    }
    throw NumericalError("clamped_plate_lambda2: root (" + std::to_string(n) + "," + std::to_string(s) +
                         ") not bracketed while scanning [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] in steps of " + std::to_string(step) +
                         "; series evaluation is only trusted up to x ~ 16");
}

} // namespace micropump::bessel
