#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lrq/dense_matrix.hpp"
#include "lrq/errors.hpp"
#include "lrq/linalg.hpp"
#include "support/oracles.hpp"

using namespace lrq;
using lrq::testing::random_dense;
using lrq::testing::random_low_rank;

namespace {

double orthonormality_error(const DenseMatrix& m, bool columns) {
    const std::size_t k = columns ? m.cols() : m.rows();
    const std::size_t len = columns ? m.rows() : m.cols();
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < len; ++t) dot += columns ? m(t, i) * m(t, j) : m(i, t) * m(j, t);
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace

TEST(DenseMatrix, RejectsWrongLengthAndNonFinite) {
    EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), ArgumentError);
    EXPECT_THROW(DenseMatrix(1, 2, std::vector<double>{1, std::numeric_limits<double>::quiet_NaN()}), ArgumentError);
    EXPECT_THROW(DenseMatrix(1, 1, std::vector<double>{std::numeric_limits<double>::infinity()}), ArgumentError);
    const DenseMatrix m(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
    EXPECT_EQ(m(1, 0), 4.0);
    EXPECT_EQ(m.row(0)[2], 3.0);
}

TEST(Svd, IdentityHasUnitSingularValues) {
    const auto r = svd(DenseMatrix::identity(3));
    ASSERT_EQ(r.singular_values.size(), 3u);
    for (double s : r.singular_values) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Svd, OuterProductSingularValueIsProductOfNorms) {
    // a = (2, 0, 0) scaled to norm 2 along (1,1)/sqrt2; b has norm 3.
    const std::vector<double> a{std::sqrt(2.0), std::sqrt(2.0)};
    const std::vector<double> b{1.0, 2.0, 2.0};
    DenseMatrix m(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
    const auto r = svd(m);
    EXPECT_NEAR(r.singular_values[0], 6.0, 1e-12);
    EXPECT_NEAR(r.singular_values[1], 0.0, 1e-12);
}

TEST(Svd, RandomMatrixRoundTrip) {
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        const auto m = random_dense(8, 5, seed);
        const auto r = svd(m);
        EXPECT_LE(frobenius_distance(r.reconstruct(), m) / frobenius_norm(m), 1e-8);
        EXPECT_LE(orthonormality_error(r.u, true), 1e-8);
        EXPECT_LE(orthonormality_error(r.v_t, false), 1e-8);
        for (std::size_t i = 1; i < r.singular_values.size(); ++i) {
            EXPECT_GE(r.singular_values[i - 1], r.singular_values[i]);
        }
        EXPECT_GE(r.singular_values.back(), 0.0);
    }
}

TEST(Svd, WideAndSparseInputsStayFinite) {
    // Mostly-zero wide matrices like early Q-learning batches.
    DenseMatrix m(32, 100);
    m(3, 7) = 1e-3;
    m(3, 8) = 2e-3;
    m(17, 50) = -5e-4;
    m(31, 99) = 1e-300;
    const auto r = svd(m);
    EXPECT_TRUE(all_finite(r.u));
    EXPECT_TRUE(all_finite(r.v_t));
    EXPECT_LE(frobenius_distance(r.reconstruct(), m), 1e-12);
}

TEST(Svd, RejectsNonFinite) {
    DenseMatrix m(2, 2);
    m.data()[0] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(svd(m), ArgumentError);
}

TEST(Svt, ZeroLambdaIsIdentity) {
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
        const auto m = random_dense(7, 4, seed);
        EXPECT_LE(frobenius_distance(svt(m, 0.0), m), 1e-8);
    }
}

TEST(Svt, LambdaAboveTopSingularValueGivesZero) {
    const auto m = random_dense(6, 6, 3);
    const double s1 = singular_values(m).front();
    EXPECT_EQ(frobenius_norm(svt(m, s1)), 0.0);
    EXPECT_EQ(frobenius_norm(svt(m, 2 * s1)), 0.0);
}

TEST(Svt, ShrinksDiagonalAnalytically) {
    const auto out = svt(DenseMatrix{{3, 0}, {0, 1}}, 1.0);
    EXPECT_NEAR(out(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(out(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(out(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(out(1, 1), 0.0, 1e-12);
}

TEST(Svt, NeverIncreasesSingularValues) {
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        const auto m = random_dense(9, 6, seed);
        const double lambda = 0.1 * (seed % 7);
        const auto before = singular_values(m);
        const auto after = singular_values(svt(m, lambda));
        for (std::size_t i = 0; i < before.size(); ++i) {
            EXPECT_LE(after[i], before[i] + 1e-10);
            EXPECT_NEAR(after[i], std::max(before[i] - lambda, 0.0), 1e-9);
        }
        EXPECT_LE(nuclear_norm(svt(m, lambda)), nuclear_norm(m) + 1e-10);
    }
}

TEST(Svt, ReportsNuclearNormOfResult) {
    const auto m = random_dense(5, 5, 11);
    double nuc = -1.0;
    const auto out = svt(m, 0.3, &nuc);
    EXPECT_NEAR(nuc, nuclear_norm(out), 1e-9);
    EXPECT_THROW(svt(m, -1.0), ArgumentError);
}

TEST(ApproximateRank, OuterProductIsRankOne) {
    EXPECT_EQ(approximate_rank(random_low_rank(10, 10, 1, 4)), 1u);
}

TEST(ApproximateRank, IdentityNeedsEveryDirection) {
    EXPECT_EQ(approximate_rank(DenseMatrix::identity(5)), 5u);
    EXPECT_EQ(approximate_rank(DenseMatrix::identity(5), 0.8), 4u);
}

TEST(ApproximateRank, RejectsZeroMatrixAndBadEnergy) {
    EXPECT_THROW(approximate_rank(DenseMatrix(3, 3)), ArgumentError);
    EXPECT_THROW(approximate_rank(DenseMatrix::identity(3), 0.0), ArgumentError);
    EXPECT_THROW(approximate_rank(DenseMatrix::identity(3), 1.5), ArgumentError);
    EXPECT_EQ(approximate_rank_or_zero(DenseMatrix(3, 3)), 0u);
}

TEST(ApproximateRank, MonotoneInEnergy) {
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        const auto m = random_dense(12, 8, seed);
        std::size_t prev = 0;
        for (double e : {0.1, 0.5, 0.9, 0.99, 0.999, 1.0}) {
            const auto k = approximate_rank(m, e);
            EXPECT_GE(k, prev);
            prev = k;
        }
    }
}

TEST(ApproximateRank, MatchesSpectrumDefinition) {
    // sigma^2 = (81, 16, 2, 1): 81/100 < 0.9 <= 97/100.
    const std::vector<double> d{9.0, 4.0, std::sqrt(2.0), 1.0};
    EXPECT_EQ(approximate_rank(DenseMatrix::diagonal(d), 0.9), 2u);
    EXPECT_EQ(approximate_rank(DenseMatrix::diagonal(d), 0.97), 2u);
    EXPECT_EQ(approximate_rank(DenseMatrix::diagonal(d), 0.98), 3u);
}
