#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <eptk/io.hpp>
#include <eptk/metric.hpp>

#include "oracles.hpp"

using namespace eptk;

namespace {

/// Relative Frobenius distance after removing the best real scale factor.
double projective_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double scale = (b.adjoint() * a).trace().real() / b.squaredNorm();
    return (a - scale * b).norm() / a.norm();
}

/// Least-squares residual of x in span(basis), relative to |x|.
double span_residual(const ComplexMatrix& x, const std::vector<ComplexMatrix>& basis) {
    Eigen::MatrixXcd a(x.size(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXcd>(basis[k].data(), basis[k].size());
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
    const Eigen::VectorXcd coef = a.colPivHouseholderQr().solve(v);
    return (a * coef - v).norm() / v.norm();
}

ComplexMatrix random_real_simple(std::mt19937_64& rng, int n) {
    // V diag(real, spread) V^-1 with a random complex V
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i) d(i) = 2.0 * i - n + 0.3 * u(rng);
    const ComplexMatrix v = ComplexMatrix::Identity(n, n) + 0.4 * oracle::random_matrix(rng, n);
    return v * d.asDiagonal() * v.inverse();
}

} // namespace

TEST(CheckPositivity, Examples) {
    auto p = check_positivity(ComplexMatrix::Identity(3, 3));
    EXPECT_DOUBLE_EQ(p.min_eig, 1.0);
    EXPECT_TRUE(p.positive);

    p = check_positivity(wdw_metric(0, 1).theta);
    EXPECT_EQ(p.min_eig, 0.0);
    EXPECT_FALSE(p.positive);

    const double e = std::exp(1.0);
    const double expect = (e + 1 / e) / 2 - std::sqrt(std::pow((e - 1 / e) / 2, 2) + 0.25);
    p = check_positivity(wdw_metric(1, 0.5).theta);
    EXPECT_NEAR(p.min_eig, expect, 1e-14);
    EXPECT_TRUE(p.positive);
    EXPECT_NEAR(wdw_metric(1, 0.5).min_eig, expect, 1e-14);

    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 1) = 0.5;
    EXPECT_THROW(check_positivity(bad), ArgumentError);
}

TEST(MetricKernel, WdwIsTwoDimensionalAndContainsClosedFamily) {
    for (double tau : {-1.0, 0.0, 0.5, 1.0}) {
        const ComplexMatrix h = eval_wdw(tau);
        const auto k = solve_metric_kernel(h);
        ASSERT_EQ(k.size(), 2u);
        for (const auto& t : k) {
            EXPECT_NEAR(t.norm(), 1.0, 1e-12);
            EXPECT_LE((t - t.adjoint()).norm(), 1e-12);
            EXPECT_LE((h.adjoint() * t - t * h).norm(), 1e-9 * h.norm());
        }
        for (double beta : {-0.9, 0.0, 0.5})
            EXPECT_LE(span_residual(wdw_metric(tau, beta).theta, k), 1e-8);
    }
}

TEST(MetricKernel, HermitianDiagonal) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    const auto k = solve_metric_kernel(h);
    ASSERT_EQ(k.size(), 2u);
    for (const auto& t : k) {
        EXPECT_LE(std::abs(t(0, 1)), 1e-12);
        EXPECT_LE(std::abs(t(0, 0).imag()) + std::abs(t(1, 1).imag()), 1e-12);
    }
}

TEST(MetricKernel, FourByFourMatchesKroneckerOracle) {
    const ComplexMatrix h = eval_four_by_four(0.5, 0.5);
    EXPECT_EQ(oracle::hermitian_sylvester_kernel_dim(h), 4);
    EXPECT_EQ(solve_metric_kernel(h).size(), 4u);
}

TEST(MetricKernel, Errors) {
    EXPECT_THROW(solve_metric_kernel(eval_four_by_four(0.0, 1.05)), DomainError);
    EXPECT_THROW(solve_metric_kernel(ComplexMatrix::Identity(3, 3)), DomainError);
    try {
        solve_metric_kernel(eval_four_by_four(0.0, 1.05));
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("spectrum not real"), std::string::npos);
    }
}

TEST(AssembleMetric, HermitianUnitWeightsGiveIdentity) {
    std::mt19937_64 rng(17);
    const ComplexMatrix h = oracle::random_hermitian(rng, 4);
    const auto m = assemble_metric(h, std::vector<double>(4, 1.0));
    EXPECT_LE((m.theta - ComplexMatrix::Identity(4, 4)).norm(), 1e-10);
    EXPECT_TRUE(m.positive);
}

TEST(AssembleMetric, WdwEqualWeightsLandInClosedFamily) {
    for (double tau : {-1.0, 0.3, 1.0, 2.0}) {
        const auto m = assemble_metric(eval_wdw(tau), std::vector<double>{1.0, 1.0});
        // Equal weights: Theta = c * (Psi Psi^dag)^-1; project onto the closed family by fitting beta.
        const double scale = std::sqrt(m.theta(0, 0).real() * m.theta(1, 1).real());
        const double beta = m.theta(0, 1).real() / scale;
        EXPECT_LT(std::abs(beta), 1.0);
        EXPECT_LE(projective_distance(m.theta, wdw_metric(tau, beta).theta), 1e-10) << tau;
    }
}

TEST(AssembleMetric, FourByFourPositiveAndQuasiHermitian) {
    const ComplexMatrix h = eval_four_by_four(0.5, 0.5);
    const auto m = assemble_metric(h, std::vector<double>(4, 1.0));
    EXPECT_TRUE(m.positive);
    EXPECT_GT(m.min_eig, 0.0);
    EXPECT_LE((h.adjoint() * m.theta - m.theta * h).norm(), 1e-9 * h.norm() * m.theta.norm());
    EXPECT_LE((m.theta - m.theta.adjoint()).norm(), 1e-12 * m.theta.norm());
}

TEST(AssembleMetric, Errors) {
    const ComplexMatrix h = eval_wdw(0.5);
    EXPECT_THROW(assemble_metric(h, std::vector<double>{1.0, 0.0}), ArgumentError);
    EXPECT_THROW(assemble_metric(h, std::vector<double>{1.0, -2.0}), ArgumentError);
    EXPECT_THROW(assemble_metric(h, std::vector<double>{1.0}), ArgumentError);
    EXPECT_THROW(assemble_metric(eval_four_by_four(0, 1.05), std::vector<double>(4, 1.0)), DomainError);
}

TEST(AssembleMetric, FamilyCompletenessOnRandomInstances) {
    std::mt19937_64 rng(4242);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix h = random_real_simple(rng, 4);
        const auto kernel = solve_metric_kernel(h);
        ASSERT_EQ(kernel.size(), 4u);
        std::vector<ComplexMatrix> dyads;
        for (int n = 0; n < 4; ++n) {
            std::vector<double> w(4, 0.0);
            w[static_cast<std::size_t>(n)] = 1.0;
            dyads.push_back(metric_from_weights(h, w));
        }
        for (const auto& k : kernel) EXPECT_LE(span_residual(k, dyads), 1e-8);
    }
}

TEST(AssembleMetric, AnisotropyGrowsTowardEP4) {
    // ray (a, a sqrt3 / 2) stays inside the domain and ends at the vertex (2, sqrt3)
    double previous = 0.0;
    for (double a : {1.0, 1.5, 1.9, 1.99}) {
        const ComplexMatrix h = eval_four_by_four(a, a * std::sqrt(3.0) / 2.0);
        const auto m = assemble_metric(h, std::vector<double>(4, 1.0));
        ASSERT_TRUE(m.positive);
        const double cond = condition_number(m.theta);
        EXPECT_GT(cond, previous) << "a=" << a;
        previous = cond;
    }
    EXPECT_GT(previous, 1e3);
}

TEST(AssembleMetric, NonUniqueness) {
    const ComplexMatrix h = eval_wdw(0.7);
    const auto a = assemble_metric(h, std::vector<double>{1.0, 1.0});
    const auto b = assemble_metric(h, std::vector<double>{1.0, 3.0});
    const ComplexMatrix na = a.theta / a.theta.norm(), nb = b.theta / b.theta.norm();
    EXPECT_GT((na - nb).norm(), 1e-2);
    for (const auto* m : {&a, &b}) EXPECT_LE((h.adjoint() * m->theta - m->theta * h).norm(), 1e-9 * h.norm() * m->theta.norm());
}

TEST(DysonMap, IdentityMetric) {
    std::mt19937_64 rng(23);
    const ComplexMatrix h = oracle::random_hermitian(rng, 3);
    MetricCandidate id;
    id.theta = ComplexMatrix::Identity(3, 3);
    id.positive = true;
    id.min_eig = 1.0;
    const auto d = dyson_map(h, id);
    EXPECT_LE((d.hermitized - h).norm(), 1e-13);
    EXPECT_LE(d.herm_residual, 1e-15);
}

TEST(DysonMap, WdwHiddenHermiticity) {
    const double e = std::exp(1.0);
    const auto d = dyson_map(eval_wdw(1.0), wdw_metric(1.0, 0.0));
    EXPECT_LE(d.herm_residual, 1e-10);
    EXPECT_LT(multiset_distance(eigenvalues(d.hermitized), {e, -e}), 1e-8);
    EXPECT_LE((d.omega.adjoint() * d.omega - wdw_metric(1.0, 0.0).theta).norm(), 1e-10 * wdw_metric(1.0, 0.0).theta.norm());
}

TEST(DysonMap, FourByFourIsospectral) {
    const ComplexMatrix h = eval_four_by_four(0.5, 0.5);
    const auto m = assemble_metric(h, std::vector<double>(4, 1.0));
    const auto d = dyson_map(h, m);
    EXPECT_LT(d.herm_residual, 1e-8);
    EXPECT_LE(multiset_distance(eigenvalues(d.hermitized), eigenvalues(h)), 1e-8);
}

TEST(DysonMap, IsospectralOnRandomInstances) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> w(0.2, 5.0);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + t % 4;
        const ComplexMatrix h = random_real_simple(rng, n);
        std::vector<double> ws;
        for (int i = 0; i < n; ++i) ws.push_back(w(rng));
        const auto m = assemble_metric(h, ws);
        const auto d = dyson_map(h, m);
        EXPECT_LE((d.omega.adjoint() * d.omega - m.theta).norm(), 1e-10 * m.theta.norm());
        EXPECT_LE(d.herm_residual, 1e-8);
        EXPECT_LE(multiset_distance(eigenvalues(d.hermitized), eigenvalues(h)), 1e-8);
    }
}

TEST(DysonMap, RejectsIndefiniteMetric) {
    EXPECT_THROW(dyson_map(eval_wdw(0.0), wdw_metric(0.0, 1.0)), DomainError);
}

TEST(ObservableCompatibility, Examples) {
    const ComplexMatrix h = eval_wdw(0.4);
    EXPECT_LE(observable_compatibility(h, wdw_metric(0.4, 0.3).theta), 1e-9);
    EXPECT_EQ(observable_compatibility(ComplexMatrix::Identity(2, 2), wdw_metric(0.4, 0.3).theta), 0.0);

    ComplexMatrix lam = ComplexMatrix::Zero(2, 2);
    lam(0, 0) = 1.0;
    lam(1, 1) = -1.0;
    // Lambda^dag Theta - Theta Lambda = [[0, 1], [-1, 0]]
    const double expect = std::sqrt(2.0) / (std::sqrt(2.0) * std::sqrt(2.5));
    EXPECT_NEAR(observable_compatibility(lam, wdw_metric(0, 0.5).theta), expect, 1e-14);

    EXPECT_THROW(observable_compatibility(ComplexMatrix::Identity(3, 3), wdw_metric(0, 0).theta), ArgumentError);
}

TEST(MetricJson, Shape) {
    const auto j = io::to_json(wdw_metric(1, 0.5));
    EXPECT_TRUE(j.contains("entries"));
    EXPECT_TRUE(j.contains("min_eig"));
    EXPECT_TRUE(j.contains("weights"));
    EXPECT_EQ(j["entries"].size(), 2u);
}
