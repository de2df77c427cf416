#ifndef CPSPECTRA_CPMAP_HPP
#define CPSPECTRA_CPMAP_HPP

// Completely positive maps tau(X) = sum_i A_i^* X A_i and their Kraus,
// Choi and superoperator representations.
//
// Conventions:
//   superoperator  vec(tau(X)) = S vec(X) with S = sum_i A_i^T kron A_i^*
//   Choi matrix    C = sum_ij E_ij kron tau(E_ij)
// The matrix sum_i conj(A_i) kron A_i belongs to the adjoint-side map and
// has the same spectrum up to conjugation; outer_radius uses that form.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cpspectra/algebra.hpp"
#include "cpspectra/mats.hpp"

namespace cpspectra {

/// Matrix of a linear map on M_m acting on column-stacked vectors.
struct SuperOperator {
  Index m = 0;
  Matrix matrix;

  SuperOperator() = default;
  /// The side of `matrix` must be a perfect square m^2.
  explicit SuperOperator(Matrix matrix);

  static SuperOperator identity(Index m);

  Matrix apply(const Matrix &x) const;
};

/// outer o inner
SuperOperator compose(const SuperOperator &outer, const SuperOperator &inner);
SuperOperator power(const SuperOperator &op, std::uint64_t n);

class CpMap {
public:
  /// Kraus operators acting on the algebra of the given shape. Throws if
  /// the sides disagree or the map does not send the algebra into itself.
  CpMap(std::vector<Matrix> kraus, AlgebraShape shape, const Tolerance &tol = {});
  /// A CP map on the full matrix algebra M_m.
  explicit CpMap(std::vector<Matrix> kraus);

  const std::vector<Matrix> &kraus() const { return kraus_; }
  const AlgebraShape &shape() const { return shape_; }
  Index side() const { return shape_.size(); }

  /// sum_i A_i^* X A_i
  Matrix operator()(const Matrix &x) const;

  /// q * tau for q >= 0 (Kraus operators scaled by sqrt(q)).
  CpMap scaled(double q) const;

private:
  std::vector<Matrix> kraus_;
  AlgebraShape shape_;
};

/// alpha_A(X) = A^* X A on M_m.
CpMap elementary(const Matrix &a);

Matrix apply(const CpMap &tau, const Matrix &x);

/// Superoperator of the Kraus map on all of M_m (shape is not applied).
SuperOperator superop_of(const CpMap &tau);

Matrix choi_of(const CpMap &tau);
Matrix choi_of(const SuperOperator &op);

/// Kraus operators from a PSD Choi matrix, one per retained eigenpair
/// (eigenvalues <= psd * max eigenvalue are dropped). Empty for C = 0.
std::vector<Matrix> kraus_of_choi(const Matrix &choi, const Tolerance &tol = {});

/// CP map on M_m with the given Choi matrix (a zero Kraus operator stands
/// in for the zero map).
CpMap cp_map_of_choi(const Matrix &choi, const Tolerance &tol = {});

/// Orthonormal (Hilbert-Schmidt) basis of a subspace of M_m.
struct CoefficientSpace {
  Index m = 0;
  std::vector<Matrix> basis;

  Index dimension() const { return static_cast<Index>(basis.size()); }
  /// Orthogonal projector on vec-space, m^2 x m^2.
  Matrix projector() const;
  /// Frobenius norm of the component of x orthogonal to the space.
  double residual(const Matrix &x) const;
  bool contains(const Matrix &x, double rel_tol) const;
};

/// Orthonormal basis of span{matrices}; the rank threshold is relative.
CoefficientSpace span_of(std::span<const Matrix> matrices, Index m, double rel_tol);

/// span of any Kraus list of tau, read off the range of conj(Choi).
CoefficientSpace coefficient_space(const CpMap &tau, const Tolerance &tol = {});
CoefficientSpace coefficient_space_of_choi(const Matrix &choi, const Tolerance &tol = {});

Index choi_rank(const CpMap &tau, const Tolerance &tol = {});
Index choi_rank(const SuperOperator &op, const Tolerance &tol = {});

/// True iff tau - eta is CP (Choi difference PSD within psd tolerance).
bool dominates(const CpMap &tau, const CpMap &eta, const Tolerance &tol = {});

struct Membership {
  bool member = false;
  /// Relative projection residual ||A - P(A)|| / ||A||.
  double residual = 0.0;
  /// Minimum-norm expansion A = sum_i lambda_i A_i over the Kraus list.
  std::vector<Complex> coefficients;
  /// ||V|| for V = (conj(lambda_i) lambda_j), i.e. sum |lambda_i|^2.
  double coefficient_norm = 0.0;
  /// q = ||V|| + 1 with alpha_A dominated by q * tau (only for members).
  std::optional<double> certificate;
};

Membership membership(const Matrix &a, const CpMap &tau, const Tolerance &tol = {});

bool is_cp(const SuperOperator &op, const Tolerance &tol = {});

/// A linear map on the algebra of `shape`, stored as the m^2 x m^2
/// superoperator of phi o compress (so it annihilates off-block entries).
class LinearMapOnAlgebra {
public:
  /// Throws if `op` does not send the algebra into itself.
  LinearMapOnAlgebra(AlgebraShape shape, const SuperOperator &op, bool claimed_positive,
                     const Tolerance &tol = {});

  static LinearMapOnAlgebra from_cp(const CpMap &tau, const Tolerance &tol = {});

  const AlgebraShape &shape() const { return shape_; }
  const SuperOperator &superop() const { return op_; }
  bool claimed_positive() const { return positive_; }

  /// Matrix of the map in algebra coordinates (dimension x dimension).
  Matrix coordinates() const;

  Matrix operator()(const Matrix &x) const { return op_.apply(x); }

private:
  AlgebraShape shape_;
  SuperOperator op_;
  bool positive_ = false;
};

} // namespace cpspectra

#endif
