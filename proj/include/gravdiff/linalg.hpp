#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace gravdiff {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
using CMat4 = Eigen::Matrix4cd;
using CVec4 = Eigen::Vector4cd;

// Quadrature ordering used by every 4x4 matrix in the library:
//   c = (x1, x2, p1, p2)
// so index 0,1 are positions and 2,3 the conjugate momenta.
namespace quad {
inline constexpr int x1 = 0;
inline constexpr int x2 = 1;
inline constexpr int p1 = 2;
inline constexpr int p2 = 3;
} // namespace quad

/// Symplectic form J = [[0, I], [-I, 0]] in (x1, x2, p1, p2) ordering.
inline Mat4 symplectic_form() {
    Mat4 j = Mat4::Zero();
    j(0, 2) = 1.0;
    j(1, 3) = 1.0;
    j(2, 0) = -1.0;
    j(3, 1) = -1.0;
    return j;
}

/// Phase-space reflection p2 -> -p2 implementing partial transposition on mode 2.
inline Mat4 partial_reflector() { return Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal(); }

/// Reflection p1 -> -p1 (partial transposition on mode 1).
inline Mat4 partial_reflector_mode1() { return Eigen::Vector4d(1.0, 1.0, -1.0, 1.0).asDiagonal(); }

template <typename Derived>
double symmetry_defect(const Eigen::MatrixBase<Derived>& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return typename Derived::PlainObject(0.5 * (m + m.transpose()));
}

/// Smallest eigenvalue of the Hermitian matrix V + i*s*M, with V real
/// symmetric and M real antisymmetric.
inline double min_eigenvalue_hermitian(const Mat4& v, const Mat4& m, double s) {
    CMat4 h = v.cast<std::complex<double>>() + std::complex<double>(0.0, s) * m.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMat4> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// Eigenvalues of a real symmetric matrix, ascending.
template <typename Derived>
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
    Eigen::MatrixXd dense = m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// PSD test with relative tolerance: min eigenvalue >= -rel_tol * max|eigenvalue|.
template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-10) {
    const Eigen::VectorXd ev = symmetric_eigenvalues(m);
    if (ev.size() == 0) return true;
    const double scale = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    return ev.minCoeff() >= -rel_tol * scale;
}

/// Cholesky factor of a symmetric positive *semi*definite matrix.
///
/// Plain LLT fails on singular inputs such as diag(g, g, 0, 0). Here a pivot
/// below `rel_tol * max diagonal` zeroes its column; for a PSD input the
/// remaining entries in that column are zero up to rounding, so L L^T still
/// reproduces the input.
template <int N>
Eigen::Matrix<double, N, N> semidefinite_cholesky(const Eigen::Matrix<double, N, N>& a, double rel_tol = 1e-13) {
    const int n = static_cast<int>(a.rows());
    Eigen::Matrix<double, N, N> l = Eigen::Matrix<double, N, N>::Zero(n, n);
    const double scale = a.diagonal().cwiseAbs().maxCoeff();
    if (scale == 0.0) return l;
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= rel_tol * scale) continue;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

} // namespace gravdiff
