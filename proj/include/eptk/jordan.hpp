#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "spectral.hpp"

namespace eptk {

struct JordanBlock {
    Complex eigenvalue;
    int size = 1;
};

/// H Q = Q J with J assembled from `blocks` in order (upper Jordan form).
struct JordanData {
    ComplexMatrix q;
    std::vector<JordanBlock> blocks;
    double residual = 0.0;
    double cond_q = 0.0;

    ComplexMatrix j() const {
        int n = 0;
        for (const auto& b : blocks) n += b.size;
        ComplexMatrix out = ComplexMatrix::Zero(n, n);
        int at = 0;
        for (const auto& b : blocks) {
            out.block(at, at, b.size, b.size) = jordan_block(b.eigenvalue, b.size);
            at += b.size;
        }
        return out;
    }
};

inline double jordan_residual(const ComplexMatrix& h, const ComplexMatrix& q, const ComplexMatrix& j) {
    const double scale = frobenius(h) * frobenius(q);
    const double r = frobenius(h * q - q * j);
    return scale > 0.0 ? r / scale : r;
}

/// Rescales a vector to unit norm with its largest-magnitude component
/// positive real.
inline ComplexVector fix_phase(ComplexVector v) {
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v /= v.norm();
    const Complex c = v(big);
    if (std::abs(c) > 0.0) v *= std::abs(c) / c;
    return v;
}

/// Transition matrix for a single-chain EP of the given order at `center`.
///
/// q1 spans ker(H - center); q_{k+1} is the minimum-norm least-squares
/// solution of (H - center) q = q_k, with the q1 component projected out.
/// Remaining eigenvalues (assumed simple) contribute their right eigenvectors
/// as 1x1 blocks after the chain.
inline JordanData transition_matrix(const ComplexMatrix& h_ep, Complex center, int order, double tol_rank = 1e-8) {
    require_square(h_ep, "transition_matrix");
    const auto n = static_cast<int>(h_ep.rows());
    if (order < 1 || order > n) throw ArgumentError("transition_matrix: order must lie in [1, dim]");

    const EPOrderEstimate est = ep_order_estimate(h_ep, center, tol_rank);
    if (est.geometric_mult != 1)
        throw DomainError("transition_matrix: geometric multiplicity " + std::to_string(est.geometric_mult) +
                          " > 1 is not supported (single Jordan chains only)");
    if (est.algebraic_mult != order)
        throw DomainError("transition_matrix: eigenvalue cluster has algebraic multiplicity " +
                          std::to_string(est.algebraic_mult) + ", expected " + std::to_string(order));

    const ComplexMatrix a = h_ep - center * ComplexMatrix::Identity(n, n);
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const ComplexMatrix& u = svd.matrixU();
    const ComplexMatrix& v = svd.matrixV();

    JordanData jd;
    jd.q = ComplexMatrix::Zero(n, n);
    const ComplexVector q1 = fix_phase(v.col(n - 1));
    jd.q.col(0) = q1;
    for (int k = 1; k < order; ++k) {
        // pinv(a) truncated to rank n-1
        const ComplexVector rhs = jd.q.col(k - 1);
        ComplexVector x = ComplexVector::Zero(n);
        for (int i = 0; i < n - 1; ++i) {
            if (!(s(i) > 0.0)) throw DomainError("transition_matrix: chain solve lost rank");
            x += (u.col(i).dot(rhs) / s(i)) * v.col(i);
        }
        x -= q1.dot(x) * q1;
        jd.q.col(k) = x;
    }
    jd.blocks.push_back({center, order});

    if (order < n) {
        const Spectrum sp = eigendecompose(h_ep);
        const double radius = ep_cluster_radius(h_ep, n);
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (std::abs(sp.eigenvalues[static_cast<std::size_t>(i)] - center) > radius) rest.push_back(i);
        if (static_cast<int>(rest.size()) != n - order)
            throw DomainError("transition_matrix: could not separate the remaining eigenvalues");
        int col = order;
        for (int i : rest) {
            jd.q.col(col++) = fix_phase(sp.right_vectors.col(i));
            jd.blocks.push_back({sp.eigenvalues[static_cast<std::size_t>(i)], 1});
        }
    }

    jd.residual = jordan_residual(h_ep, jd.q, jd.j());
    jd.cond_q = condition_number(jd.q);
    if (!std::isfinite(jd.cond_q)) throw DomainError("transition_matrix: Q is singular");
    return jd;
}

/// V = Q^-1 W Q, the perturbation expressed in the Jordan basis.
inline ComplexMatrix canonicalize_perturbation(const JordanData& jd, const ComplexMatrix& w) {
    require_square(w, "canonicalize_perturbation");
    if (w.rows() != jd.q.rows()) throw ArgumentError("canonicalize_perturbation: dimension mismatch");
    if (!std::isfinite(jd.cond_q) || jd.cond_q > 1.0 / kEps) throw DomainError("canonicalize_perturbation: Q is singular");
    return jd.q.fullPivLu().solve(w * jd.q);
}

inline std::vector<Complex> perturbed_spectrum(const ComplexMatrix& h_ep, const ComplexMatrix& w, double lam) {
    require_square(h_ep, "perturbed_spectrum");
    if (w.rows() != h_ep.rows() || w.cols() != h_ep.cols())
        throw ArgumentError("perturbed_spectrum: dimension mismatch");
    return eigenvalues(h_ep + lam * w);
}

struct PerturbationProbe {
    ComplexMatrix direction;
    std::pair<double, double> lambda_range;
    Complex center;
    bool side_plus_real = false;
    bool side_minus_real = false;
    double exponent_fit = 0.0;
    double fit_r2 = 0.0;
    std::vector<double> lambdas;
    std::vector<double> deviations;
};

inline constexpr int kMinProbeSamples = 5;

/// Fits max_n |eps_n(lambda) - center| ~ lambda^p on log-uniform samples in
/// [lam_min, lam_max]. For a generic perturbation of an order-N EP p = 1/N.
///
/// Side flags report whether the spectrum at +lam_max / -lam_max is real
/// (relative tolerance tol_rel).
inline PerturbationProbe splitting_exponent(const ComplexMatrix& h_ep, const ComplexMatrix& w, double lam_min,
                                            double lam_max, int samples,
                                            double tol_rel = kDefaultRealityTol) {
    if (!(lam_min > 0.0 && lam_min < lam_max)) throw ArgumentError("splitting_exponent: need 0 < lam_min < lam_max");
    if (samples < kMinProbeSamples) throw ArgumentError("splitting_exponent: need at least 5 samples");

    PerturbationProbe p;
    p.direction = w;
    p.lambda_range = {lam_min, lam_max};
    p.center = ep_center(h_ep);

    const double step = std::log(lam_max / lam_min) / (samples - 1);
    std::vector<double> xs, ys;
    for (int i = 0; i < samples; ++i) {
        const double lam = lam_min * std::exp(step * i);
        double dev = 0.0;
        for (const auto& e : perturbed_spectrum(h_ep, w, lam)) dev = std::max(dev, std::abs(e - p.center));
        p.lambdas.push_back(lam);
        p.deviations.push_back(dev);
        if (!(dev > 0.0)) throw DomainError("splitting_exponent: degenerate fit (perturbation does not move the spectrum)");
        xs.push_back(std::log(lam));
        ys.push_back(std::log(dev));
    }

    const double n = static_cast<double>(samples);
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < samples; ++i) {
        mx += xs[static_cast<std::size_t>(i)] / n;
        my += ys[static_cast<std::size_t>(i)] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double dx = xs[static_cast<std::size_t>(i)] - mx, dy = ys[static_cast<std::size_t>(i)] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw DomainError("splitting_exponent: degenerate fit (zero variance)");
    p.exponent_fit = sxy / sxx;
    p.fit_r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;

    const double tol = tol_rel * std::max(frobenius(h_ep), 1.0);
    p.side_plus_real = classify_reality(perturbed_spectrum(h_ep, w, lam_max), tol).tag != RealityTag::ComplexPresent;
    p.side_minus_real = classify_reality(perturbed_spectrum(h_ep, w, -lam_max), tol).tag != RealityTag::ComplexPresent;
    return p;
}

enum class Admissibility { PlusSide, MinusSide, BothSides, Neither };

inline std::string_view to_string(Admissibility a) {
    switch (a) {
    case Admissibility::PlusSide: return "plus-side";
    case Admissibility::MinusSide: return "minus-side";
    case Admissibility::BothSides: return "both-sides";
    case Admissibility::Neither: return "neither";
    }
    return "?";
}

/// Signs of lambda for which H_EP + lambda W has an entirely real spectrum
/// (absolute tolerance tol on imaginary parts).
inline Admissibility admissibility_probe(const ComplexMatrix& h_ep, const ComplexMatrix& w, double lam, double tol) {
    if (!(lam > 0.0)) throw ArgumentError("admissibility_probe: lambda must be > 0");
    const bool plus = classify_reality(perturbed_spectrum(h_ep, w, lam), tol).tag != RealityTag::ComplexPresent;
    const bool minus = classify_reality(perturbed_spectrum(h_ep, w, -lam), tol).tag != RealityTag::ComplexPresent;
    if (plus && minus) return Admissibility::BothSides;
    if (plus) return Admissibility::PlusSide;
    if (minus) return Admissibility::MinusSide;
    return Admissibility::Neither;
}

} // namespace eptk
