#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "matrix.hpp"

namespace eptk {

/// Eigen-data of a dense matrix. Column n of right_vectors / left_vectors
/// belongs to eigenvalues[n]; left vectors satisfy M^dag phi = conj(E) phi.
struct Spectrum {
    std::vector<Complex> eigenvalues;
    ComplexMatrix right_vectors;
    ComplexMatrix left_vectors;
    std::vector<double> cond_numbers;
    std::vector<std::vector<int>> clusters;

    int dim() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

enum class RealityTag { RealNondegenerate, RealDegenerate, ComplexPresent };

struct RealityClass {
    RealityTag tag = RealityTag::RealNondegenerate;
    double max_imag = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
};

struct EPOrderEstimate {
    Complex center;
    int algebraic_mult = 0;
    int geometric_mult = 0;
};

inline std::string_view to_string(RealityTag tag) {
    switch (tag) {
    case RealityTag::RealNondegenerate: return "REAL_ND";
    case RealityTag::RealDegenerate: return "REAL_DEG";
    case RealityTag::ComplexPresent: return "COMPLEX";
    }
    return "?";
}

/// Relative reality tolerance used wherever a caller does not pass one.
inline constexpr double kDefaultRealityTol = 1e-8;

/// Rounding floor of an order-`order` eigenvalue cluster: eigenvalues of a
/// defective block move like eps^(1/order).
inline double ep_cluster_radius(const ComplexMatrix& m, int order) {
    const double scale = std::max(frobenius(m), 1.0e-300);
    return 10.0 * std::pow(kEps, 1.0 / std::max(order, 1)) * scale;
}

namespace detail {

inline constexpr int kSchurIterationsPerRow = 30;

// The Schur iteration runs in extended precision: near an order-N EP the
// solver's own rounding is amplified like eps^(1/N), and working in long
// double leaves only the rounding already present in the double entries.
using WideComplex = std::complex<long double>;
using WideMatrix = Eigen::Matrix<WideComplex, Eigen::Dynamic, Eigen::Dynamic>;

inline Eigen::ComplexEigenSolver<WideMatrix> solve_eigen(const ComplexMatrix& m, bool vectors) {
    const int max_iter = kSchurIterationsPerRow * static_cast<int>(m.rows());
    Eigen::ComplexEigenSolver<WideMatrix> es;
    es.setMaxIterations(max_iter);
    es.compute(m.cast<WideComplex>(), vectors);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver did not converge", max_iter);
    return es;
}

inline std::vector<Complex> narrow(const Eigen::Matrix<WideComplex, Eigen::Dynamic, 1>& v) {
    std::vector<Complex> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out[static_cast<std::size_t>(i)] = {static_cast<double>(v(i).real()), static_cast<double>(v(i).imag())};
    return out;
}

inline ComplexMatrix narrow(const WideMatrix& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i)
        out.data()[i] = {static_cast<double>(m.data()[i].real()), static_cast<double>(m.data()[i].imag())};
    return out;
}

} // namespace detail

/// Eigenvalues only; cheaper than a full decomposition.
inline std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
    require_square(m, "eigenvalues");
    require_finite(m, "eigenvalues");
    return detail::narrow(detail::solve_eigen(m, false).eigenvalues());
}

/// Right and left eigenvectors with per-eigenvalue condition numbers.
///
/// Left vectors come from a separate decomposition of M^dag and are paired
/// with right vectors by nearest conjugate eigenvalue, ties to lower index.
/// All vectors have unit 2-norm, so cond_n = 1 / |<phi_n|psi_n>|.
inline Spectrum eigendecompose(const ComplexMatrix& m) {
    require_square(m, "eigendecompose");
    require_finite(m, "eigendecompose");
    const auto n = static_cast<int>(m.rows());

    const auto right = detail::solve_eigen(m, true);
    const ComplexMatrix adj = m.adjoint();
    const auto left = detail::solve_eigen(adj, true);
    const auto left_values = detail::narrow(left.eigenvalues());
    const ComplexMatrix left_vectors = detail::narrow(left.eigenvectors());

    Spectrum s;
    s.eigenvalues = detail::narrow(right.eigenvalues());
    s.right_vectors = detail::narrow(right.eigenvectors());
    s.left_vectors.resize(n, n);
    s.cond_numbers.resize(static_cast<std::size_t>(n));

    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        int pick = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double d = std::abs(std::conj(left_values[static_cast<std::size_t>(j)]) - s.eigenvalues[static_cast<std::size_t>(i)]);
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        used[static_cast<std::size_t>(pick)] = true;
        s.left_vectors.col(i) = left_vectors.col(pick);
    }

    for (int i = 0; i < n; ++i) {
        s.right_vectors.col(i).normalize();
        s.left_vectors.col(i).normalize();
        const double overlap = std::abs(s.left_vectors.col(i).dot(s.right_vectors.col(i)));
        s.cond_numbers[static_cast<std::size_t>(i)] =
            overlap > 0.0 ? 1.0 / overlap : std::numeric_limits<double>::infinity();
    }
    return s;
}

/// Groups eigenvalues into connected components of the "closer than radius"
/// graph. Components are listed by smallest member index.
inline Spectrum cluster_eigenvalues(Spectrum sp, double radius) {
    if (!(radius >= 0.0)) throw ArgumentError("cluster radius must be >= 0");
    const auto n = sp.eigenvalues.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(sp.eigenvalues[i] - sp.eigenvalues[j]) < radius) {
                const auto ri = find(i), rj = find(j);
                parent[std::max(ri, rj)] = std::min(ri, rj);
            }

    sp.clusters.clear();
    std::vector<int> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(sp.clusters.size());
            sp.clusters.emplace_back();
        }
        sp.clusters[static_cast<std::size_t>(slot[r])].push_back(static_cast<int>(i));
    }
    return sp;
}

/// Classifies a list of eigenvalues. tol is absolute.
inline RealityClass classify_reality(const std::vector<Complex>& values, double tol) {
    if (!(tol > 0.0)) throw ArgumentError("reality tolerance must be > 0");
    RealityClass rc;
    for (const auto& e : values) rc.max_imag = std::max(rc.max_imag, std::abs(e.imag()));
    const bool real = rc.max_imag <= tol;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            const double gap = real ? std::abs(values[i].real() - values[j].real())
                                    : std::abs(values[i] - values[j]);
            rc.min_gap = std::min(rc.min_gap, gap);
        }
    if (!real)
        rc.tag = RealityTag::ComplexPresent;
    else
        rc.tag = rc.min_gap > tol ? RealityTag::RealNondegenerate : RealityTag::RealDegenerate;
    return rc;
}

inline RealityClass classify_reality(const Spectrum& sp, double tol) {
    return classify_reality(sp.eigenvalues, tol);
}

/// Algebraic multiplicity from the eigenvalue cluster nearest `center`,
/// geometric multiplicity from the numerical rank of (M - center I) at
/// threshold tol_rank * sigma_max.
///
/// cluster_radius defaults to the rounding floor of a dim-fold cluster.
inline EPOrderEstimate ep_order_estimate(const ComplexMatrix& m, Complex center, double tol_rank,
                                         std::optional<double> cluster_radius = std::nullopt) {
    require_square(m, "ep_order_estimate");
    if (!(tol_rank > 0.0)) throw ArgumentError("rank tolerance must be > 0");
    const auto n = static_cast<int>(m.rows());
    const double radius = cluster_radius.value_or(ep_cluster_radius(m, n));

    Spectrum sp;
    sp.eigenvalues = eigenvalues(m);
    sp = cluster_eigenvalues(std::move(sp), radius);

    std::size_t nearest = 0;
    for (std::size_t i = 1; i < sp.eigenvalues.size(); ++i)
        if (std::abs(sp.eigenvalues[i] - center) < std::abs(sp.eigenvalues[nearest] - center))
            nearest = i;
    if (std::abs(sp.eigenvalues[nearest] - center) > radius)
        throw DomainError("no eigenvalue cluster near the requested center");

    EPOrderEstimate est;
    est.center = center;
    for (const auto& c : sp.clusters)
        if (std::find(c.begin(), c.end(), static_cast<int>(nearest)) != c.end())
            est.algebraic_mult = static_cast<int>(c.size());

    const ComplexMatrix shifted = m - center * ComplexMatrix::Identity(n, n);
    const int geom = n - numerical_rank(shifted, tol_rank);
    est.geometric_mult = std::clamp(geom, 1, est.algebraic_mult);
    return est;
}

/// Mean of the largest eigenvalue cluster at the rounding floor of a
/// dim-fold cluster; the natural center of an EP matrix.
inline Complex ep_center(const ComplexMatrix& m) {
    Spectrum sp;
    sp.eigenvalues = eigenvalues(m);
    sp = cluster_eigenvalues(std::move(sp), ep_cluster_radius(m, static_cast<int>(m.rows())));
    const auto& biggest = *std::max_element(sp.clusters.begin(), sp.clusters.end(),
                                            [](const auto& a, const auto& b) { return a.size() < b.size(); });
    Complex sum = 0.0;
    for (int i : biggest) sum += sp.eigenvalues[static_cast<std::size_t>(i)];
    return sum / static_cast<double>(biggest.size());
}

} // namespace eptk
