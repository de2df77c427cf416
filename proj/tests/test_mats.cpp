#include <gtest/gtest.h>

#include <cmath>

#include "cpspectra/error.hpp"
#include "cpspectra/mats.hpp"
#include "test_support.hpp"

using namespace cpspectra;
using cpspectra::testing::random_matrix;

TEST(Mats, VecOfProductIsKroneckerAction) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(3, rng), x = random_matrix(3, rng), b = random_matrix(3, rng);
    EXPECT_LT((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm(), 1e-12);
  }
}

TEST(Mats, VecUsesColumnStacking) {
  EXPECT_EQ(vec(unit(3, 1, 2))(1 + 2 * 3), Complex(1.0));
  std::mt19937_64 rng(5);
  const Matrix x = random_matrix(4, rng);
  EXPECT_EQ(unvec(vec(x)), x);
  EXPECT_EQ(exact_sqrt(16), 4);
  EXPECT_EQ(exact_sqrt(15), -1);
  EXPECT_THROW(unvec(Vector::Zero(5)), PreconditionError);
}

TEST(Mats, KronPowerSide) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_EQ(kron_power(a, 3).rows(), 8);
  EXPECT_LT((kron_power(a, 2) - kron(a, a)).norm(), 1e-14);
}

TEST(Mats, SpectralRadiusOfSwap) {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  EXPECT_NEAR(spectral_radius(s), 1.0, 1e-14);
  EXPECT_NEAR(op_norm(s), 1.0, 1e-14);
}

TEST(Mats, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(require_finite(a, "test"), PreconditionError);
  EXPECT_THROW(spectral_radius(a), PreconditionError);
}

TEST(Mats, SchurReorderMovesSelectedToFront) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = random_matrix(6, rng);
    SchurForm form = schur(m);
    const auto select = [](Complex z) { return z.real() > 0.0; };
    const Index moved = reorder_schur(form, select);
    EXPECT_LT((form.unitary * form.triangular * form.unitary.adjoint() - m).norm(), 1e-10 * m.norm());
    EXPECT_LT((form.unitary.adjoint() * form.unitary - Matrix::Identity(6, 6)).norm(), 1e-12);
    for (Index i = 0; i < 6; ++i) {
      EXPECT_EQ(select(form.triangular(i, i)), i < moved);
      for (Index j = 0; j < i; ++j) {
        EXPECT_LT(std::abs(form.triangular(i, j)), 1e-12);
      }
    }
  }
}

TEST(Mats, TriangularSylvester) {
  std::mt19937_64 rng(3);
  Matrix a = random_matrix(3, rng).triangularView<Eigen::Upper>();
  Matrix b = random_matrix(2, rng).triangularView<Eigen::Upper>();
  b.diagonal().array() += 10.0;
  const Matrix c = random_matrix(3, 2, rng);
  const Matrix y = solve_triangular_sylvester(a, b, c);
  EXPECT_LT((a * y - y * b - c).norm(), 1e-12);
}

TEST(Mats, SpectralProjectorIsRieszProjection) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = random_matrix(5, rng);
    const auto select = [](Complex z) { return std::abs(z) > 1.5; };
    const Matrix p = spectral_projector(m, select);
    EXPECT_LT((p * p - p).norm(), 1e-9);
    EXPECT_LT((p * m - m * p).norm(), 1e-9);
    Index expected = 0;
    for (Complex z : eigenvalues(m)) {
      expected += select(z) ? 1 : 0;
    }
    EXPECT_NEAR(p.trace().real(), static_cast<double>(expected), 1e-9);
  }
}

TEST(Mats, ProjectorOnJordanBlockIsIdentityOnTheBlock) {
  Matrix m(3, 3);
  m << 2, 1, 0, 0, 2, 5, 0, 0, -1;
  const Matrix p = spectral_projector(m, [](Complex z) { return z.real() > 0; });
  EXPECT_LT((p * p - p).norm(), 1e-12);
  EXPECT_NEAR(p.trace().real(), 2.0, 1e-12);
}

TEST(Mats, PsdChecksAndRoots) {
  std::mt19937_64 rng(5);
  const Matrix w = cpspectra::testing::random_psd(4, rng);
  const PsdReport rep = psd_checks(w);
  EXPECT_TRUE(rep.is_hermitian);
  EXPECT_TRUE(rep.is_psd);
  EXPECT_TRUE(rep.is_strictly_positive);
  const Matrix root = herm_sqrt(w);
  EXPECT_LT((root * root - w).norm(), 1e-10 * w.norm());
  EXPECT_LT((inverse(w) * w - Matrix::Identity(4, 4)).norm(), 1e-9);

  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  EXPECT_TRUE(psd_checks(singular).is_psd);
  EXPECT_FALSE(psd_checks(singular).is_strictly_positive);
  EXPECT_THROW(inverse(singular), PreconditionError);
  EXPECT_FALSE(psd_checks(-Matrix::Identity(2, 2)).is_psd);
}

TEST(Mats, ExpAndPower) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  const Matrix e = mat_exp(d);
  EXPECT_NEAR(e(0, 0).real(), std::exp(1.0), 1e-13);
  EXPECT_NEAR(e(1, 1).real(), std::exp(-2.0), 1e-13);
  Matrix f(2, 2);
  f << 1, 1, 1, 0;
  // Fibonacci: F^10 = [[F11, F10], [F10, F9]]
  const Matrix p = power(f, 10);
  EXPECT_NEAR(p(0, 0).real(), 89.0, 1e-10);
  EXPECT_NEAR(p(0, 1).real(), 55.0, 1e-10);
  EXPECT_EQ(power(f, 0), Matrix::Identity(2, 2));
}

TEST(Mats, ClustersMergeCloseEigenvalues) {
  const std::vector<Complex> values = {1.0, 1.0 + 1e-10, -1.0, 0.5, Complex(0, 1)};
  const auto clusters = cluster_eigenvalues(values, 1e-8);
  ASSERT_EQ(clusters.size(), 4u);
  EXPECT_EQ(clusters[0].multiplicity + clusters[1].multiplicity + clusters[2].multiplicity, 4);
  EXPECT_NEAR(std::abs(clusters.back().center), 0.5, 1e-15);
  EXPECT_EQ(nearest_cluster(clusters, Complex(0.49, 0)), clusters.size() - 1);
}

TEST(Mats, RankWithTolerance) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-12;
  EXPECT_EQ(rank_tol(m, 1e-9), 1);
  EXPECT_EQ(rank_abs(m, 1e-13), 2);
  EXPECT_EQ(orthonormal_range(m, 1e-9).cols(), 1);
}
