#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <eptk/io.hpp>
#include <eptk/models.hpp>
#include <eptk/spectral.hpp>

#include "oracles.hpp"

using namespace eptk;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) m(i, i) = x, ++i;
    return m;
}

Spectrum from_values(std::vector<Complex> v) {
    Spectrum s;
    s.eigenvalues = std::move(v);
    return s;
}

} // namespace

TEST(Eigendecompose, DiagonalMatrix) {
    const auto s = eigendecompose(diag({-3, -1, 1, 3}));
    EXPECT_LT(multiset_distance(s.eigenvalues, {-3.0, -1.0, 1.0, 3.0}), 1e-14);
    EXPECT_TRUE(s.clusters.empty());
    for (double c : s.cond_numbers) EXPECT_NEAR(c, 1.0, 1e-12);
}

TEST(Eigendecompose, WdwAtZeroAndOne) {
    EXPECT_LT(multiset_distance(eigendecompose(eval_wdw(0.0)).eigenvalues, {-1.0, 1.0}), 1e-14);
    const double e = std::exp(1.0);
    EXPECT_LT(multiset_distance(eigendecompose(eval_wdw(1.0)).eigenvalues, {-e, e}), 1e-12);
}

TEST(Eigendecompose, RejectsNonFinite) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    EXPECT_THROW(eigendecompose(m), ArgumentError);
    EXPECT_THROW(eigendecompose(ComplexMatrix(2, 3)), ArgumentError);
}

TEST(Eigendecompose, ResidualBoundOnRandomMatrices) {
    std::mt19937_64 rng(20261016);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + trial % 11;
        const ComplexMatrix m = oracle::random_matrix(rng, n);
        const auto s = eigendecompose(m);
        const double bound = 100.0 * kEps * m.norm();
        for (int k = 0; k < n; ++k) {
            const Complex e = s.eigenvalues[static_cast<std::size_t>(k)];
            EXPECT_LE((m * s.right_vectors.col(k) - e * s.right_vectors.col(k)).norm(), bound) << "n=" << n;
            EXPECT_LE((m.adjoint() * s.left_vectors.col(k) - std::conj(e) * s.left_vectors.col(k)).norm(), bound)
                << "n=" << n;
            EXPECT_NEAR(s.right_vectors.col(k).norm(), 1.0, 1e-14);
            EXPECT_NEAR(s.left_vectors.col(k).norm(), 1.0, 1e-14);
            EXPECT_GE(s.cond_numbers[static_cast<std::size_t>(k)], 1.0 - 1e-12);
        }
    }
}

TEST(Eigendecompose, BiorthogonalityWhenWellSeparated) {
    std::mt19937_64 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + trial % 9;
        const ComplexMatrix m = oracle::random_matrix(rng, n);
        const auto s = eigendecompose(m);
        const auto rc = classify_reality(s, 1e-300 + 1e-12);
        if (!(rc.min_gap > 1e-4 * m.norm())) continue;
        ++checked;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) EXPECT_LE(std::abs(s.left_vectors.col(i).dot(s.right_vectors.col(j))), 1e-8);
    }
    EXPECT_GT(checked, 40);
}

TEST(ClusterEigenvalues, Examples) {
    auto s = cluster_eigenvalues(from_values({-3.0, -1.0, 1.0, 3.0}), 0.1);
    ASSERT_EQ(s.clusters.size(), 4u);

    s = cluster_eigenvalues(from_values({2.0 - 1e-9, 2.0 + 1e-9, 6.0}), 1e-6);
    ASSERT_EQ(s.clusters.size(), 2u);
    EXPECT_EQ(s.clusters[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(s.clusters[1], (std::vector<int>{2}));

    EXPECT_THROW(cluster_eigenvalues(from_values({1.0}), -1.0), ArgumentError);
}

TEST(ClusterEigenvalues, BoseHubbardNearEP) {
    // The c = 0 spectrum 5 sqrt(1 - gamma^2) * {+-1, +-3/5, +-1/5} is well inside 0.1.
    const auto exact = oracle::bose_hubbard_c0_spectrum(6, 0.999999, 1.0);
    EXPECT_LT(oracle::max_abs_deviation(exact, 0.0), 0.01);
    const auto s = cluster_eigenvalues(eigendecompose(eval_bose_hubbard(6, 0.999999, 0.0, 1.0)), 0.1);
    ASSERT_EQ(s.clusters.size(), 1u);
    EXPECT_EQ(s.clusters[0].size(), 6u);
    EXPECT_LT(oracle::max_abs_deviation(s.eigenvalues, 0.0), 0.02);
}

TEST(ClusterEigenvalues, Idempotent) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 50; ++t) {
        std::vector<Complex> v;
        for (int i = 0; i < 8; ++i) v.emplace_back(u(rng), u(rng));
        const auto once = cluster_eigenvalues(from_values(v), 0.4);
        const auto twice = cluster_eigenvalues(once, 0.4);
        EXPECT_EQ(once.clusters, twice.clusters);
        std::vector<int> seen;
        for (const auto& c : once.clusters) seen.insert(seen.end(), c.begin(), c.end());
        std::sort(seen.begin(), seen.end());
        EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
    }
}

TEST(ClassifyReality, Examples) {
    auto rc = classify_reality(from_values({-3.0, -1.0, 1.0, 3.0}), 1e-8);
    EXPECT_EQ(rc.tag, RealityTag::RealNondegenerate);
    EXPECT_DOUBLE_EQ(rc.min_gap, 2.0);

    rc = classify_reality(from_values({2.0, 2.0, 6.0}), 1e-8);
    EXPECT_EQ(rc.tag, RealityTag::RealDegenerate);

    // inner radicand 64 - 64 * 1.05^2 < 0
    const ComplexMatrix h = eval_four_by_four(0.0, 1.05);
    rc = classify_reality(eigendecompose(h), 1e-8 * h.norm());
    EXPECT_EQ(rc.tag, RealityTag::ComplexPresent);
    EXPECT_GT(rc.max_imag, 1e-8 * h.norm());

    EXPECT_THROW(classify_reality(from_values({1.0}), 0.0), ArgumentError);
}

TEST(ClassifyReality, HermitianNeverComplex) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        const ComplexMatrix m = oracle::random_hermitian(rng, 2 + t % 10);
        EXPECT_NE(classify_reality(eigendecompose(m), 1e-10 * m.norm()).tag, RealityTag::ComplexPresent);
    }
}

TEST(EpOrderEstimate, Examples) {
    ComplexMatrix h2(2, 2);
    h2 << 1.0, 1.0, -1.0, -1.0;
    auto est = ep_order_estimate(h2, 0.0, 1e-8);
    EXPECT_EQ(est.algebraic_mult, 2);
    EXPECT_EQ(est.geometric_mult, 1);

    est = ep_order_estimate(ComplexMatrix::Identity(3, 3), 1.0, 1e-8);
    EXPECT_EQ(est.algebraic_mult, 3);
    EXPECT_EQ(est.geometric_mult, 3);

    est = ep_order_estimate(eval_bose_hubbard(6, 1.0, 0.0, 1.0), 0.0, 1e-8);
    EXPECT_EQ(est.algebraic_mult, 6);
    EXPECT_EQ(est.geometric_mult, 1);
}

TEST(EpOrderEstimate, EmptyClusterIsAnError) {
    EXPECT_THROW(ep_order_estimate(ComplexMatrix::Identity(2, 2), 5.0, 1e-8), DomainError);
}

TEST(EpOrderEstimate, ChainNilpotency) {
    for (int n = 2; n <= 8; ++n) {
        const ComplexMatrix h = eval_ep_chain(n);
        ComplexMatrix p = ComplexMatrix::Identity(n, n);
        for (int k = 0; k < n; ++k) p = p * h;
        EXPECT_LE(p.norm(), 1e-8 * std::pow(h.norm(), n)) << "N=" << n;
        const auto est = ep_order_estimate(h, 0.0, 1e-8);
        EXPECT_EQ(est.algebraic_mult, n);
        EXPECT_EQ(est.geometric_mult, 1);
    }
}

TEST(SpectrumJson, Shape) {
    auto s = cluster_eigenvalues(eigendecompose(eval_wdw(0.0)), 0.1);
    const auto j = io::to_json(s);
    ASSERT_TRUE(j.contains("eigenvalues"));
    ASSERT_TRUE(j.contains("cond"));
    ASSERT_TRUE(j.contains("clusters"));
    EXPECT_EQ(j["eigenvalues"].size(), 2u);
    EXPECT_EQ(j["eigenvalues"][0].size(), 2u);
    EXPECT_EQ(j["clusters"].size(), 2u);
}
