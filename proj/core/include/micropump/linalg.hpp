#pragma once

#include <cstddef>
#include <vector>

namespace micropump::linalg {

/// Dense row-major square matrix of doubles. Minimal value type; the
/// eigensolvers below own all the numerics (problem sizes stay <= ~300).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t n, std::size_t m, double fill = 0.0) : n_(n), m_(m), a_(n * m, fill) {}

    std::size_t rows() const { return n_; }
    std::size_t cols() const { return m_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * m_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * m_ + j]; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

private:
    std::size_t n_ = 0, m_ = 0;
    std::vector<double> a_;
};

struct EigenResult {
    std::vector<double> values; // ascending
    Matrix vectors;             // column k pairs with values[k]
};

/// max |a(i,j) - a(j,i)|
double symmetry_defect(const Matrix& a);

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
/// Throws NumericalError naming the failing pivot when not PD.
Matrix cholesky(const Matrix& a);

/// Eigenvalues/vectors of a dense symmetric matrix. Householder reduction
/// to tridiagonal form followed by implicit-shift QL with accumulated
/// transforms. Values ascending, vectors orthonormal.
EigenResult eigen_symmetric(const Matrix& a);

/// Generalized symmetric problem K x = lambda M x with M positive definite.
/// Reduced via M = L L^T to a standard symmetric problem, solved as above,
/// eigenvectors back-transformed and M-normalized (x^T M x = 1).
EigenResult eigen_symmetric_generalized(const Matrix& k, const Matrix& m);

} // namespace micropump::linalg
