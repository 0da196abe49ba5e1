#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace eptk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Builds a dim x dim matrix from row-major entries.
inline ComplexMatrix make_matrix(int dim, std::span<const Complex> row_major) {
    if (dim < 1) throw ArgumentError("matrix dimension must be >= 1");
    if (row_major.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
        throw ArgumentError("matrix needs dim^2 entries");
    ComplexMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = row_major[static_cast<std::size_t>(i * dim + j)];
    return m;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() < 1 || m.rows() != m.cols())
        throw ArgumentError(std::string(what) + ": expected a non-empty square matrix");
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        const Complex z = m.data()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ArgumentError(std::string(what) + ": non-finite matrix entry");
    }
}

inline double frobenius(const ComplexMatrix& m) { return m.norm(); }

/// Singular values, descending.
inline RealVector singular_values(const ComplexMatrix& m) {
    return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
}

inline double sigma_min(const ComplexMatrix& m) {
    const RealVector s = singular_values(m);
    return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

/// 2-norm condition number; +inf for singular input.
inline double condition_number(const ComplexMatrix& m) {
    const RealVector s = singular_values(m);
    const double lo = s(s.size() - 1);
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / lo;
}

/// Numerical rank with threshold rel_tol * sigma_max.
inline int numerical_rank(const ComplexMatrix& m, double rel_tol) {
    const RealVector s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cut = rel_tol * s(0);
    return static_cast<int>(std::count_if(s.begin(), s.end(), [cut](double v) { return v > cut; }));
}

/// Jordan block matrix of the given size with superdiagonal ones.
inline ComplexMatrix jordan_block(Complex eigenvalue, int size) {
    ComplexMatrix j = ComplexMatrix::Zero(size, size);
    for (int k = 0; k < size; ++k) {
        j(k, k) = eigenvalue;
        if (k + 1 < size) j(k, k + 1) = 1.0;
    }
    return j;
}

/// Minimal max-distance matching between two equal-size multisets of complex
/// numbers (bottleneck assignment). Exact by permutation search up to 8
/// elements, greedy nearest pairing beyond that.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double best = std::numeric_limits<double>::infinity();
        do {
            double worst = 0.0;
            for (std::size_t i = 0; i < n && worst < best; ++i)
                worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
            best = std::min(best, worst);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    double worst = 0.0;
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pick = n;
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (!used[j] && std::abs(a[i] - b[j]) < d) {
                d = std::abs(a[i] - b[j]);
                pick = j;
            }
        }
        used[pick] = true;
        worst = std::max(worst, d);
    }
    return worst;
}

inline std::vector<Complex> to_std(const ComplexVector& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace eptk
