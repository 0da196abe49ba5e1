#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline Matrix random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, int n) {
    const Matrix a = random_matrix(rng, n);
    return 0.5 * (a + a.adjoint());
}

/// Two-mode BH at c = 0 is -2i gamma J_z + 2v J_x for spin j = (N-1)/2, so its
/// spectrum is (N-1-2k) sqrt(v^2 - gamma^2), k = 0..N-1.
inline std::vector<Complex> bose_hubbard_c0_spectrum(int n, double gamma, double v) {
    const Complex root = std::sqrt(Complex(v * v - gamma * gamma, 0.0));
    std::vector<Complex> out;
    for (int k = 0; k < n; ++k) out.push_back(static_cast<double>(n - 1 - 2 * k) * root);
    return out;
}

/// Dimension of the real space of Hermitian X with A^dag X = X A, via the
/// Kronecker form vec(A^dag X - X A) = (I (x) A^dag - A^T (x) I) vec(X) and a
/// column-pivoted QR rank on the real Hermitian coordinates.
inline int hermitian_sylvester_kernel_dim(const Matrix& a, double rel_tol = 1e-9) {
    const int n = static_cast<int>(a.rows());
    const Matrix id = Matrix::Identity(n, n);
    Matrix kron(n * n, n * n);
    const Matrix ad = a.adjoint();
    const Matrix at = a.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            kron.block(i * n, j * n, n, n) = id(i, j) * ad - at(i, j) * id;

    // Real coordinates: X = sum_k c_k B_k over a Hermitian basis B_k.
    std::vector<Matrix> basis;
    for (int i = 0; i < n; ++i) {
        Matrix b = Matrix::Zero(n, n);
        b(i, i) = 1.0;
        basis.push_back(b);
        for (int j = i + 1; j < n; ++j) {
            Matrix r = Matrix::Zero(n, n), s = Matrix::Zero(n, n);
            r(i, j) = r(j, i) = 1.0;
            s(i, j) = Complex(0, 1);
            s(j, i) = Complex(0, -1);
            basis.push_back(r);
            basis.push_back(s);
        }
    }
    Eigen::MatrixXd op(2 * n * n, n * n);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        Eigen::VectorXcd vecx(n * n);
        for (int col = 0; col < n; ++col) vecx.segment(col * n, n) = basis[k].col(col);
        const Eigen::VectorXcd img = kron * vecx;
        for (int r = 0; r < n * n; ++r) {
            op(r, static_cast<Eigen::Index>(k)) = img(r).real();
            op(n * n + r, static_cast<Eigen::Index>(k)) = img(r).imag();
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(op);
    qr.setThreshold(rel_tol);
    return n * n - static_cast<int>(qr.rank());
}

/// Roots of x^2 + p x + q.
inline std::pair<Complex, Complex> quadratic_roots(Complex p, Complex q) {
    const Complex d = std::sqrt(p * p - 4.0 * q);
    return {(-p + d) / 2.0, (-p - d) / 2.0};
}

inline double max_abs_deviation(const std::vector<Complex>& v, Complex c) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z - c));
    return m;
}

} // namespace oracle
