#ifndef CPSPECTRA_ALGEBRA_HPP
#define CPSPECTRA_ALGEBRA_HPP

// Finite-dimensional C*-algebras M_{n1} + ... + M_{nd}, realized as the
// block-diagonal matrices of M_m with m = n1 + ... + nd.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpspectra/mats.hpp"

namespace cpspectra {

class CpMap;

class AlgebraShape {
public:
  explicit AlgebraShape(std::vector<Index> blocks);

  /// The full matrix algebra M_m.
  static AlgebraShape full(Index m);
  /// Parses a comma separated block list such as "2,1".
  static AlgebraShape parse(std::string_view text);

  const std::vector<Index> &blocks() const { return blocks_; }
  Index block_count() const { return static_cast<Index>(blocks_.size()); }
  /// Side m of the ambient matrix algebra.
  Index size() const { return m_; }
  /// Complex dimension sum n_i^2.
  Index dimension() const;
  /// Row/column offset of block k.
  Index offset(Index k) const;
  bool is_full() const { return blocks_.size() == 1; }
  std::string to_string() const;

  friend bool operator==(const AlgebraShape &, const AlgebraShape &) = default;

private:
  std::vector<Index> blocks_;
  Index m_ = 0;
};

/// A block-diagonal element of the algebra, stored as its embedded m x m
/// matrix. Entries outside the diagonal blocks are exactly zero.
class AlgebraElement {
public:
  /// Accepts x if it is a member of the algebra within tolerance; the
  /// off-block residue is then cleared.
  AlgebraElement(AlgebraShape shape, const Matrix &x, const Tolerance &tol = {});

  static AlgebraElement identity(const AlgebraShape &shape);

  const AlgebraShape &shape() const { return shape_; }
  const Matrix &matrix() const { return matrix_; }
  Matrix block(Index k) const;

private:
  AlgebraShape shape_;
  Matrix matrix_;
};

AlgebraElement embed(std::span<const Matrix> blocks, const AlgebraShape &shape);

/// Block-diagonal part of x (the conditional expectation onto the algebra).
AlgebraElement compress(const Matrix &x, const AlgebraShape &shape);

/// ||x - compress(x)|| <= psd * max(1, ||x||)
bool is_member(const Matrix &x, const AlgebraShape &shape, const Tolerance &tol = {});

/// Superoperator (m^2 x m^2) of the compression map.
Matrix compression_superop(const AlgebraShape &shape);

/// Isometry J (m^2 x dim) whose columns are vec(E_ij) for the matrix units
/// inside the blocks, block by block and column-major within a block.
Matrix algebra_coordinates(const AlgebraShape &shape);

/// J^* T J: the matrix of a map on the algebra in algebra coordinates.
Matrix restrict_to_algebra(const Matrix &superop, const AlgebraShape &shape);

/// Extension of a CP map on the algebra to all of M_m by precomposing with
/// the compression. The Kraus list is recovered from the Choi matrix.
CpMap canonical_extension(const CpMap &tau, const Tolerance &tol = {});

} // namespace cpspectra

#endif
