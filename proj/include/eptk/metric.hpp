#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "models.hpp"
#include "spectral.hpp"

namespace eptk {

/// Hermitian candidate metric with its positivity diagnostics. weights is
/// empty when the metric was not assembled from spectral data.
struct MetricCandidate {
    ComplexMatrix theta;
    std::vector<double> weights;
    double min_eig = 0.0;
    bool positive = false;
};

struct DysonMap {
    ComplexMatrix omega;
    ComplexMatrix hermitized;
    double herm_residual = 0.0;
};

struct Positivity {
    double min_eig;
    bool positive;
};

/// Smallest eigenvalue of (theta + theta^dag)/2. Values within a few ulps of
/// zero (relative to |theta|) are reported as exactly zero.
inline Positivity check_positivity(const ComplexMatrix& theta) {
    require_square(theta, "check_positivity");
    const double scale = frobenius(theta);
    if (frobenius(theta - theta.adjoint()) > 1e-6 * scale)
        throw ArgumentError("check_positivity: matrix is not Hermitian");
    const ComplexMatrix sym = 0.5 * (theta + theta.adjoint());
    double lo = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (std::abs(lo) <= 10.0 * kEps * scale) lo = 0.0;
    return {lo, lo > 0.0};
}

/// Closed-form WDW metric [[e^-tau, beta], [beta, e^tau]]; admissible iff
/// |beta| < 1.
inline MetricCandidate wdw_metric(double tau, double beta) {
    if (!(std::abs(tau) <= kWdwTauLimit)) throw ArgumentError("wdw: |tau| must be <= 300");
    MetricCandidate m;
    m.theta = ComplexMatrix::Zero(2, 2);
    m.theta(0, 0) = std::exp(-tau);
    m.theta(1, 1) = std::exp(tau);
    m.theta(0, 1) = beta;
    m.theta(1, 0) = beta;
    // det / lambda_max keeps the sign of 1 - beta^2 exact.
    const double lam_max = std::cosh(tau) + std::hypot(std::sinh(tau), beta);
    m.min_eig = (1.0 - beta * beta) / lam_max;
    m.positive = beta * beta < 1.0;
    return m;
}

namespace detail {

inline constexpr double kSimpleGapRel = 1e-6;

/// Spectrum of h after checking that it is real and simple.
inline Spectrum real_simple_spectrum(const ComplexMatrix& h) {
    require_square(h, "metric");
    const double scale = frobenius(h);
    Spectrum sp = eigendecompose(h);
    const RealityClass rc = classify_reality(sp, std::max(kDefaultRealityTol * scale, 1e-300));
    if (rc.tag == RealityTag::ComplexPresent)
        throw DomainError("no Hermitian metric family (spectrum not real)");
    if (!(rc.min_gap > kSimpleGapRel * scale))
        throw DomainError("degenerate spectrum: metric family is not dyadic here, use the jordan module");
    return sp;
}

/// Left eigenvectors rescaled to <phi_n|psi_n> = 1.
inline ComplexMatrix biorthonormal_left(const Spectrum& sp) {
    ComplexMatrix phi = sp.left_vectors;
    for (Eigen::Index n = 0; n < phi.cols(); ++n) {
        const Complex overlap = phi.col(n).dot(sp.right_vectors.col(n));
        phi.col(n) /= std::conj(overlap);
    }
    return phi;
}

/// Frobenius-orthonormal real basis of the n x n Hermitian matrices.
inline std::vector<ComplexMatrix> hermitian_basis(int n) {
    std::vector<ComplexMatrix> basis;
    basis.reserve(static_cast<std::size_t>(n * n));
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            ComplexMatrix re = ComplexMatrix::Zero(n, n);
            re(i, j) = s;
            re(j, i) = s;
            basis.push_back(re);
            ComplexMatrix im = ComplexMatrix::Zero(n, n);
            im(i, j) = Complex(0.0, s);
            im(j, i) = Complex(0.0, -s);
            basis.push_back(im);
        }
    return basis;
}

} // namespace detail

/// Theta = sum_n w_n |phi_n><phi_n| for arbitrary real weights; the full
/// Hermitian solution family of H^dag Theta = Theta H when H has a real
/// simple spectrum.
inline ComplexMatrix metric_from_weights(const ComplexMatrix& h, std::span<const double> weights) {
    const Spectrum sp = detail::real_simple_spectrum(h);
    if (weights.size() != static_cast<std::size_t>(h.rows()))
        throw ArgumentError("metric: need one weight per eigenvalue");
    const ComplexMatrix phi = detail::biorthonormal_left(sp);
    ComplexMatrix theta = ComplexMatrix::Zero(h.rows(), h.cols());
    for (Eigen::Index n = 0; n < phi.cols(); ++n)
        theta += weights[static_cast<std::size_t>(n)] * phi.col(n) * phi.col(n).adjoint();
    return 0.5 * (theta + theta.adjoint());
}

/// Positive metric assembled from strictly positive weights; weight n goes
/// with eigenvalue n of eigendecompose(h).
inline MetricCandidate assemble_metric(const ComplexMatrix& h, std::span<const double> weights) {
    for (double w : weights)
        if (!(w > 0.0)) throw ArgumentError("metric weights must be > 0");
    MetricCandidate m;
    m.theta = metric_from_weights(h, weights);
    m.weights.assign(weights.begin(), weights.end());
    const auto pos = check_positivity(m.theta);
    m.min_eig = pos.min_eig;
    m.positive = pos.positive;
    return m;
}

/// Basis of the real vector space of Hermitian Theta with H^dag Theta = Theta H,
/// each element of unit Frobenius norm.
inline std::vector<ComplexMatrix> solve_metric_kernel(const ComplexMatrix& h) {
    detail::real_simple_spectrum(h);
    const auto n = static_cast<int>(h.rows());
    const auto basis = detail::hermitian_basis(n);
    const ComplexMatrix hd = h.adjoint();

    Eigen::MatrixXd op(2 * n * n, n * n);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const ComplexMatrix image = hd * basis[k] - basis[k] * h;
        for (int idx = 0; idx < n * n; ++idx) {
            op(2 * idx, static_cast<Eigen::Index>(k)) = image.data()[idx].real();
            op(2 * idx + 1, static_cast<Eigen::Index>(k)) = image.data()[idx].imag();
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-9 * sv(0);

    std::vector<ComplexMatrix> kernel;
    for (int col = 0; col < n * n; ++col) {
        const double s = col < sv.size() ? sv(col) : 0.0;
        if (s > cut) continue;
        ComplexMatrix theta = ComplexMatrix::Zero(n, n);
        for (std::size_t k = 0; k < basis.size(); ++k)
            theta += svd.matrixV()(static_cast<Eigen::Index>(k), col) * basis[k];
        theta /= frobenius(theta);
        kernel.push_back(theta);
    }
    return kernel;
}

/// Positive square root Omega of theta and the Hermitized h = Omega H Omega^-1.
inline DysonMap dyson_map(const ComplexMatrix& h, const MetricCandidate& metric) {
    require_square(h, "dyson_map");
    if (h.rows() != metric.theta.rows()) throw ArgumentError("dyson_map: dimension mismatch");
    if (!metric.positive) throw DomainError("dyson_map: metric is not positive definite");

    const ComplexMatrix sym = 0.5 * (metric.theta + metric.theta.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    const RealVector lam = es.eigenvalues();
    if (!(lam(0) > 0.0)) throw DomainError("dyson_map: metric is not positive definite");
    const ComplexMatrix& u = es.eigenvectors();
    const RealVector root = lam.cwiseSqrt();

    DysonMap d;
    d.omega = u * root.cast<Complex>().asDiagonal() * u.adjoint();
    const ComplexMatrix omega_inv = u * root.cwiseInverse().cast<Complex>().asDiagonal() * u.adjoint();
    d.hermitized = d.omega * h * omega_inv;
    const double hn = frobenius(d.hermitized);
    d.herm_residual = hn > 0.0 ? frobenius(d.hermitized - d.hermitized.adjoint()) / hn : 0.0;
    return d;
}

/// |Lambda^dag Theta - Theta Lambda|_F / (|Lambda|_F |Theta|_F); zero means the
/// observable is self-adjoint in the metric.
inline double observable_compatibility(const ComplexMatrix& lambda_op, const ComplexMatrix& theta) {
    require_square(lambda_op, "observable_compatibility");
    require_square(theta, "observable_compatibility");
    if (lambda_op.rows() != theta.rows()) throw ArgumentError("observable_compatibility: dimension mismatch");
    const double denom = frobenius(lambda_op) * frobenius(theta);
    if (denom == 0.0) return 0.0;
    return frobenius(lambda_op.adjoint() * theta - theta * lambda_op) / denom;
}

} // namespace eptk
