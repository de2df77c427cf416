#include <gtest/gtest.h>

#include <cmath>

#include "cpspectra/error.hpp"
#include "cpspectra/perron.hpp"
#include "cpspectra/reference_maps.hpp"
#include "cpspectra/spectra.hpp"
#include "test_support.hpp"

using namespace cpspectra;

namespace {
const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
}

// Oracle values below were computed independently with numpy
// (eigvals / norm over explicit Kronecker sums and word enumeration).
TEST(OuterRadius, GoldenPairOracle) {
  EXPECT_NEAR(outer_radius(golden_pair()), 2.135779205069857, 1e-12);
}

TEST(OuterRadius, SingleIdentityIsOne) {
  const std::vector<Matrix> one = {Matrix::Identity(2, 2)};
  EXPECT_NEAR(outer_radius(one), 1.0, 1e-14);
}

TEST(OuterRadius, GelfandIterationApproachesTheRadius) {
  std::mt19937_64 rng(31);
  const auto tuple = cpspectra::testing::random_tuple(2, 3, rng);
  EXPECT_NEAR(outer_radius_gelfand(tuple, 4000) / outer_radius(tuple), 1.0, 2e-3);
}

TEST(OuterRadius, AdjointTupleHasTheSameRadius) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    auto tuple = cpspectra::testing::random_tuple(3, 3, rng);
    std::vector<Matrix> adj;
    for (const Matrix &a : tuple) {
      adj.push_back(a.adjoint());
    }
    EXPECT_NEAR(outer_radius(adj), outer_radius(tuple), 1e-9 * outer_radius(tuple));
  }
}

TEST(Jsr, GoldenPairBruteOracle) {
  const JsrEstimate est = jsr_brute(golden_pair(), 10);
  EXPECT_NEAR(est.upper, 1.6180339887498947, 1e-12);
  EXPECT_NEAR(est.lower, 1.618033988749895, 1e-12);
  EXPECT_EQ(est.words, 2046u);
}

TEST(Jsr, GoldenPairTensorOracle) {
  const JsrEstimate est = jsr_tensor_approx(golden_pair(), 2);
  EXPECT_NEAR(est.upper, 1.8134574202660312, 1e-12);
  EXPECT_NEAR(est.lower, 1.5249298439169545, 1e-12);
  EXPECT_LE(est.lower, golden);
  EXPECT_GE(est.upper, golden);
}

TEST(Jsr, ParallelMatchesSerial) {
  std::mt19937_64 rng(33);
  const auto tuple = cpspectra::testing::random_tuple(3, 2, rng);
  JsrBruteOptions par;
  par.workers = 3;
  const JsrEstimate a = jsr_brute(tuple, 7);
  const JsrEstimate b = jsr_brute(tuple, 7, par);
  EXPECT_DOUBLE_EQ(a.upper, b.upper);
  EXPECT_DOUBLE_EQ(a.lower, b.lower);
  EXPECT_EQ(a.words, b.words);
}

TEST(Jsr, BudgetsAreEnforced) {
  EXPECT_THROW(jsr_brute(golden_pair(), 25), BudgetExceeded);
  EXPECT_THROW(jsr_tensor_approx(golden_pair(), 7), BudgetExceeded);
  EXPECT_THROW(jsr_brute({}, 3), PreconditionError);
}

TEST(Jsr, SingletonGivesTheSpectralRadius) {
  std::mt19937_64 rng(34);
  const std::vector<Matrix> one = {cpspectra::testing::random_matrix(2, rng)};
  const double r = spectral_radius(one[0]);
  EXPECT_NEAR(jsr_tensor_approx(one, 1).upper, r, 1e-12);
  EXPECT_NEAR(jsr_brute(one, 10).lower, r, 1e-12);
}

TEST(Friedland, PerronVectorAttainsTheRadius) {
  const auto phi = LinearMapOnAlgebra::from_cp(fibonacci_map());
  const PerronVector pv = perron_vector(phi);
  EXPECT_NEAR(friedland_value(phi, pv.l.matrix()), golden, 1e-9);
  EXPECT_GE(friedland_value(phi, Matrix::Identity(3, 3)), golden - 1e-12);
  Matrix off = Matrix::Identity(3, 3);
  off(0, 2) = 0.1;
  off(2, 0) = 0.1;
  EXPECT_THROW(friedland_value(phi, off), PreconditionError);
}

TEST(Friedland, ScaledOuterRadiusAtRootOfL) {
  const CpMap tau = fibonacci_map();
  const CpMap ext = canonical_extension(tau);
  const PerronVector pv = perron_vector(LinearMapOnAlgebra::from_cp(tau));
  const Matrix v = herm_sqrt(pv.l.matrix());
  EXPECT_NEAR(scaled_outer_radius(ext.kraus(), v), outer_radius(ext.kraus()), 1e-6);
}

TEST(Neumann, WitnessSolvesTheResolventEquation) {
  const auto phi = LinearMapOnAlgebra::from_cp(fibonacci_map());
  const NeumannWitness nw = neumann_witness(phi, 2.0);
  EXPECT_LT(nw.residual, 1e-10);
  EXPECT_TRUE(psd_checks(nw.w - Matrix::Identity(3, 3)).is_psd);
  EXPECT_THROW(neumann_witness(phi, 1.5), PreconditionError);
  EXPECT_THROW(neumann_witness(phi, golden), PreconditionError);
}

TEST(NormAchieving, ConjugationByRootOfPerronVector) {
  const auto phi = LinearMapOnAlgebra::from_cp(fibonacci_map());
  const PerronVector pv = perron_vector(phi);
  const NormAchieving na = norm_achieving_check(phi, pv.l.matrix());
  EXPECT_TRUE(na.achieved);
  EXPECT_NEAR(na.norm, golden, 1e-8);
  // sigma = a + (r - 1) e, a + (r - 1) e, r d on the diagonal.
  const LinearMapOnAlgebra sigma = conjugate_map(phi, na.v);
  Matrix x = Matrix::Zero(3, 3);
  x(0, 0) = 2.0;
  x(1, 1) = 3.0;
  x(2, 2) = 5.0;
  const Matrix y = sigma(x);
  EXPECT_NEAR(y(0, 0).real(), 2.0 + (golden - 1.0) * 5.0, 1e-10);
  EXPECT_NEAR(y(2, 2).real(), golden * 3.0, 1e-10);
}

TEST(NormAchieving, RejectsNonSupersolution) {
  const auto phi = LinearMapOnAlgebra::from_cp(fibonacci_map());
  Matrix w = Matrix::Identity(3, 3);
  w(2, 2) = 10.0;
  EXPECT_THROW(norm_achieving_check(phi, w), PreconditionError);
}

TEST(Balance, NormalMatrixKeepsItsNorm) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = Complex(0, 1);
  const BalancedSimilarity b = balance_similarity(a);
  EXPECT_NEAR(b.norm, 1.0, 1e-12);
}

TEST(Balance, InteriorJordanStructureIsScaledAway) {
  Matrix a(2, 2);
  a << 0.5, 10, 0, 0.25;
  const BalancedSimilarity b = balance_similarity(a);
  EXPECT_LE(b.norm, 0.5 * (1.0 + 1e-6));
  EXPECT_LT((b.p * b.p_inverse - Matrix::Identity(2, 2)).norm(), 1e-9);
  EXPECT_LT((b.p * a * b.p_inverse).norm() - b.norm, 1.0);
}

TEST(Balance, RandomBoundedMatrices) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    // Peripheral eigenvalues 1 and -1 (semisimple), an interior Jordan block.
    Matrix d = Matrix::Zero(4, 4);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    d(2, 2) = 0.3;
    d(3, 3) = 0.3;
    d(2, 3) = 1.0;
    const Matrix s = cpspectra::testing::random_matrix(4, rng);
    const Matrix a = s * d * inverse(s);
    BalanceOptions opts;
    opts.power_bound = 1e8;
    const BalancedSimilarity b = balance_similarity(a, opts);
    EXPECT_LE(b.norm, 1.0 + 1e-6) << "trial " << trial;
  }
}

TEST(Balance, PeripheralJordanBlocksAreRejected) {
  Matrix spec_example(2, 2);
  spec_example << 0.5, 100, 0, 0.5;
  EXPECT_THROW(balance_similarity(spec_example), PreconditionError);
  Matrix shear(2, 2);
  shear << 1, 1, 0, 1;
  EXPECT_THROW(balance_similarity(shear), PreconditionError);
  EXPECT_THROW(balance_similarity(Matrix::Zero(2, 2)), PreconditionError);
}

TEST(SingularCombination, LandsOnTheBoundaryOfTheCone) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix w1 = cpspectra::testing::random_psd(3, rng);
    const Matrix w2 = cpspectra::testing::random_psd(3, rng);
    const Matrix w3 = singular_psd_combination(w1, w2);
    const PsdReport rep = psd_checks(w3, Tolerance{1e-9, 1e-8, 1e-10});
    EXPECT_TRUE(rep.is_psd);
    EXPECT_LT(std::abs(rep.min_eigenvalue), 1e-8 * op_norm(w1));
    EXPECT_GT(op_norm(w3), 1e-6);
  }
}

TEST(SingularCombination, Preconditions) {
  const Matrix one = Matrix::Identity(2, 2);
  EXPECT_THROW(singular_psd_combination(one, 2.0 * one), PreconditionError);
  EXPECT_THROW(singular_psd_combination(one, -one + unit(2, 0, 0)), PreconditionError);
  const Matrix e = unit(2, 0, 0);
  EXPECT_EQ(singular_psd_combination(e, one), e);
}

TEST(Jsr, LongWordsDoNotOverflow) {
  const std::vector<Matrix> big = {3.0 * Matrix::Identity(2, 2)};
  const JsrEstimate est = jsr_brute(big, 2000);
  EXPECT_NEAR(est.upper, 3.0, 1e-12);
  EXPECT_NEAR(est.lower, 3.0, 1e-12);
  const std::vector<Matrix> nil = {unit(2, 0, 1)};
  EXPECT_EQ(jsr_brute(nil, 5).upper, 0.0);
  EXPECT_EQ(jsr_brute(nil, 5).lower, 0.0);
}
