#include "micropump/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "micropump/errors.hpp"

namespace micropump::linalg {

namespace {

double hypot2(double a, double b) { return std::hypot(a, b); }

// Householder reduction of a symmetric matrix to tridiagonal form,
// accumulating the orthogonal transform in-place (classic tred2).
// On exit: d = diagonal, e = subdiagonal (e[0] unused), z = transform.
void tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = z.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (n == 0) return;

    for (std::size_t i = n - 1; i >= 1; --i) {
        std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL on the tridiagonal (d, e), rotations applied to the
// columns of z (classic tqli).
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const std::size_t n = d.size();
    if (n <= 1) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-16 * dd) break;
            }
            if (m != l) {
                if (++iter == 60)
                    throw NumericalError("symmetric QL iteration failed to converge (60 sweeps)");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void sort_ascending(std::vector<double>& d, Matrix& z) {
    const std::size_t n = d.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> ds(n);
    Matrix zs(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        ds[k] = d[idx[k]];
        for (std::size_t i = 0; i < n; ++i) zs(i, k) = z(i, idx[k]);
    }
    d = std::move(ds);
    z = std::move(zs);
}

} // namespace

double symmetry_defect(const Matrix& a) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            worst = std::max(worst, std::fabs(a(i, j) - a(j, i)));
    return worst;
}

Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = a(j, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (s <= 0.0)
            throw NumericalError("cholesky: matrix not positive definite at pivot " + std::to_string(j) +
                                 " (value " + std::to_string(s) + ")");
        l(j, j) = std::sqrt(s);
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / l(j, j);
        }
    }
    return l;
}

EigenResult eigen_symmetric(const Matrix& a) {
    EigenResult res;
    res.vectors = a;
    std::vector<double> e;
    tridiagonalize(res.vectors, res.values, e);
    ql_implicit(res.values, e, res.vectors);
    sort_ascending(res.values, res.vectors);
    return res;
}

EigenResult eigen_symmetric_generalized(const Matrix& k, const Matrix& m) {
    const std::size_t n = k.rows();
    Matrix l = cholesky(m);

    // W = L^-1 K  (forward substitution on each column of K)
    Matrix w(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = k(i, col);
            for (std::size_t p = 0; p < i; ++p) s -= l(i, p) * w(p, col);
            w(i, col) = s / l(i, i);
        }
    }
    // A = L^-1 W^T, symmetric by construction
    Matrix a(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = w(col, i);
            for (std::size_t p = 0; p < i; ++p) s -= l(i, p) * a(p, col);
            a(i, col) = s / l(i, i);
        }
    }
    // scrub roundoff asymmetry before Householder
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = v;
        }

    EigenResult res = eigen_symmetric(a);

    // back-transform: x = L^-T y, then normalize x^T M x = 1
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = res.vectors(ii, col);
            for (std::size_t p = ii + 1; p < n; ++p) s -= l(p, ii) * res.vectors(p, col);
            res.vectors(ii, col) = s / l(ii, ii);
        }
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mi = 0.0;
            for (std::size_t j = 0; j < n; ++j) mi += m(i, j) * res.vectors(j, col);
            q += res.vectors(i, col) * mi;
        }
        double scale = 1.0 / std::sqrt(q);
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, col) *= scale;
    }
    return res;
}

} // namespace micropump::linalg
