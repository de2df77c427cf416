#include "cpspectra/cpmap.hpp"

#include <cmath>
#include <sstream>

#include "cpspectra/error.hpp"

namespace cpspectra {

SuperOperator::SuperOperator(Matrix mat) : matrix(std::move(mat)) {
  require_square(matrix, "SuperOperator");
  m = exact_sqrt(matrix.rows());
  if (m < 0) {
    throw PreconditionError("SuperOperator: side is not a perfect square");
  }
}

SuperOperator SuperOperator::identity(Index m) {
  return SuperOperator(Matrix::Identity(m * m, m * m));
}

Matrix SuperOperator::apply(const Matrix &x) const {
  if (x.rows() != m || x.cols() != m) {
    throw PreconditionError("SuperOperator::apply: argument side mismatch");
  }
  return unvec(matrix * vec(x));
}

SuperOperator compose(const SuperOperator &outer, const SuperOperator &inner) {
  if (outer.m != inner.m) {
    throw PreconditionError("compose: side mismatch");
  }
  return SuperOperator(outer.matrix * inner.matrix);
}

SuperOperator power(const SuperOperator &op, std::uint64_t n) {
  return SuperOperator(power(op.matrix, n));
}

namespace {

Index common_side(const std::vector<Matrix> &kraus) {
  if (kraus.empty()) {
    throw PreconditionError("CpMap: the Kraus list must not be empty");
  }
  const Index m = kraus.front().rows();
  for (const Matrix &a : kraus) {
    if (a.rows() != m || a.cols() != m) {
      throw PreconditionError("CpMap: Kraus operators must share one square side");
    }
    require_finite(a, "CpMap");
  }
  return m;
}

} // namespace

CpMap::CpMap(std::vector<Matrix> kraus, AlgebraShape shape, const Tolerance &tol)
    : kraus_(std::move(kraus)), shape_(std::move(shape)) {
  const Index m = common_side(kraus_);
  if (m != shape_.size()) {
    std::ostringstream os;
    os << "CpMap: Kraus side " << m << " does not match shape [" << shape_.to_string() << "]";
    throw PreconditionError(os.str());
  }
  if (!shape_.is_full()) {
    const Matrix phi = compression_superop(shape_);
    const Matrix restricted = superop_of(*this).matrix * phi;
    const double leak = op_norm(restricted - phi * restricted);
    if (leak > tol.psd * std::max(1.0, op_norm(restricted))) {
      throw PreconditionError("CpMap: the Kraus map does not send the algebra [" + shape_.to_string() +
                              "] into itself");
    }
  }
}

CpMap::CpMap(std::vector<Matrix> kraus) : CpMap(kraus, AlgebraShape::full(common_side(kraus))) {}

Matrix CpMap::operator()(const Matrix &x) const {
  if (x.rows() != side() || x.cols() != side()) {
    throw PreconditionError("CpMap: argument side mismatch");
  }
  Matrix out = Matrix::Zero(side(), side());
  for (const Matrix &a : kraus_) {
    out.noalias() += a.adjoint() * x * a;
  }
  return out;
}

CpMap CpMap::scaled(double q) const {
  if (!(q >= 0.0)) {
    throw PreconditionError("CpMap::scaled: factor must be nonnegative");
  }
  std::vector<Matrix> kraus;
  kraus.reserve(kraus_.size());
  for (const Matrix &a : kraus_) {
    kraus.push_back(std::sqrt(q) * a);
  }
  return CpMap(std::move(kraus), shape_);
}

CpMap elementary(const Matrix &a) { return CpMap(std::vector<Matrix>{a}); }

Matrix apply(const CpMap &tau, const Matrix &x) { return tau(x); }

SuperOperator superop_of(const CpMap &tau) {
  const Index m = tau.side();
  Matrix s = Matrix::Zero(m * m, m * m);
  for (const Matrix &a : tau.kraus()) {
    s += kron(a.transpose(), a.adjoint());
  }
  return SuperOperator(std::move(s));
}

Matrix choi_of(const SuperOperator &op) {
  const Index m = op.m;
  Matrix c(m * m, m * m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      // Column i + j*m of the superoperator is vec(tau(E_ij)).
      c.block(i * m, j * m, m, m) = unvec(op.matrix.col(i + j * m));
    }
  }
  return c;
}

Matrix choi_of(const CpMap &tau) {
  const Index m = tau.side();
  Matrix c = Matrix::Zero(m * m, m * m);
  for (const Matrix &a : tau.kraus()) {
    // Block (i, j) of the Choi matrix of alpha_A is (A^* e_i)(e_j^T A), so
    // the whole matrix is w w^* with w the conjugated row-major entries of A.
    const Matrix at = a.transpose();
    const Vector w = vec(at).conjugate();
    c.noalias() += w * w.adjoint();
  }
  return c;
}

std::vector<Matrix> kraus_of_choi(const Matrix &choi, const Tolerance &tol) {
  require_square(choi, "kraus_of_choi");
  if (exact_sqrt(choi.rows()) < 0) {
    throw PreconditionError("kraus_of_choi: side is not a perfect square");
  }
  const PsdReport report = psd_checks(choi, tol);
  if (!report.is_psd) {
    std::ostringstream os;
    os << "kraus_of_choi: Choi matrix is not positive semidefinite (min eigenvalue "
       << report.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }
  std::vector<Matrix> kraus;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(choi));
  const Eigen::VectorXd &lambda = solver.eigenvalues();
  const double top = lambda.size() ? lambda(lambda.size() - 1) : 0.0;
  if (top <= 0.0) {
    return kraus;
  }
  for (Index k = lambda.size() - 1; k >= 0; --k) {
    if (lambda(k) <= tol.psd * top) {
      break;
    }
    // Inverse of the rank-one assembly in choi_of(CpMap): w = conj(vec(A^T)).
    const Vector w = std::sqrt(lambda(k)) * solver.eigenvectors().col(k);
    kraus.push_back(unvec(w).adjoint());
  }
  return kraus;
}

CpMap cp_map_of_choi(const Matrix &choi, const Tolerance &tol) {
  std::vector<Matrix> kraus = kraus_of_choi(choi, tol);
  const Index m = exact_sqrt(choi.rows());
  if (kraus.empty()) {
    kraus.push_back(Matrix::Zero(m, m));
  }
  return CpMap(std::move(kraus));
}

Matrix CoefficientSpace::projector() const {
  Matrix p = Matrix::Zero(m * m, m * m);
  for (const Matrix &b : basis) {
    const Vector v = vec(b);
    p.noalias() += v * v.adjoint();
  }
  return p;
}

double CoefficientSpace::residual(const Matrix &x) const {
  Matrix r = x;
  for (const Matrix &b : basis) {
    r -= hs_inner(b, r) * b;
  }
  return r.norm();
}

bool CoefficientSpace::contains(const Matrix &x, double rel_tol) const {
  return residual(x) <= rel_tol * x.norm();
}

CoefficientSpace span_of(std::span<const Matrix> matrices, Index m, double rel_tol) {
  CoefficientSpace space{m, {}};
  if (matrices.empty()) {
    return space;
  }
  Matrix stacked(m * m, static_cast<Index>(matrices.size()));
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    if (matrices[k].rows() != m || matrices[k].cols() != m) {
      throw PreconditionError("span_of: side mismatch");
    }
    stacked.col(static_cast<Index>(k)) = vec(matrices[k]);
  }
  const Matrix q = orthonormal_range(stacked, rel_tol);
  for (Index k = 0; k < q.cols(); ++k) {
    space.basis.push_back(unvec(q.col(k)));
  }
  return space;
}

CoefficientSpace coefficient_space_of_choi(const Matrix &choi, const Tolerance &tol) {
  const Index m = exact_sqrt(choi.rows());
  if (m < 0) {
    throw PreconditionError("coefficient_space: Choi side is not a perfect square");
  }
  // With this library's Choi convention the range of conj(C) is spanned by
  // the vectors vec(A^T), so unvec is followed by a transpose.
  const Matrix range = orthonormal_range(choi.conjugate(), tol.rank);
  CoefficientSpace space{m, {}};
  for (Index k = 0; k < range.cols(); ++k) {
    space.basis.push_back(unvec(range.col(k)).transpose());
  }
  return space;
}

CoefficientSpace coefficient_space(const CpMap &tau, const Tolerance &tol) {
  return coefficient_space_of_choi(choi_of(tau), tol);
}

Index choi_rank(const CpMap &tau, const Tolerance &tol) { return rank_tol(choi_of(tau), tol.rank); }

Index choi_rank(const SuperOperator &op, const Tolerance &tol) {
  return rank_tol(choi_of(op), tol.rank);
}

bool dominates(const CpMap &tau, const CpMap &eta, const Tolerance &tol) {
  if (tau.side() != eta.side()) {
    throw PreconditionError("dominates: side mismatch");
  }
  return psd_checks(choi_of(tau) - choi_of(eta), tol).is_psd;
}

Membership membership(const Matrix &a, const CpMap &tau, const Tolerance &tol) {
  const Index m = tau.side();
  if (a.rows() != m || a.cols() != m) {
    throw PreconditionError("membership: side mismatch");
  }
  Membership out;
  const CoefficientSpace space = coefficient_space(tau, tol);
  const double scale = a.norm();
  out.residual = scale > 0.0 ? space.residual(a) / scale : 0.0;
  out.member = out.residual <= tol.rank || scale == 0.0;
  if (!out.member) {
    return out;
  }
  const auto &kraus = tau.kraus();
  Matrix k_mat(m * m, static_cast<Index>(kraus.size()));
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    k_mat.col(static_cast<Index>(i)) = vec(kraus[i]);
  }
  const Vector lambda = k_mat.completeOrthogonalDecomposition().solve(vec(a));
  out.coefficients.assign(lambda.data(), lambda.data() + lambda.size());
  out.coefficient_norm = lambda.squaredNorm();
  out.certificate = out.coefficient_norm + 1.0;
  return out;
}

bool is_cp(const SuperOperator &op, const Tolerance &tol) { return psd_checks(choi_of(op), tol).is_psd; }

LinearMapOnAlgebra::LinearMapOnAlgebra(AlgebraShape shape, const SuperOperator &op, bool claimed_positive,
                                       const Tolerance &tol)
    : shape_(std::move(shape)), positive_(claimed_positive) {
  if (op.m != shape_.size()) {
    throw PreconditionError("LinearMapOnAlgebra: superoperator side does not match the shape");
  }
  require_finite(op.matrix, "LinearMapOnAlgebra");
  if (shape_.is_full()) {
    op_ = op;
    return;
  }
  const Matrix phi = compression_superop(shape_);
  Matrix restricted = op.matrix * phi;
  const double leak = op_norm(restricted - phi * restricted);
  if (leak > tol.psd * std::max(1.0, op_norm(restricted))) {
    throw PreconditionError("LinearMapOnAlgebra: map does not send the algebra [" + shape_.to_string() +
                            "] into itself");
  }
  op_ = SuperOperator(phi * restricted);
}

LinearMapOnAlgebra LinearMapOnAlgebra::from_cp(const CpMap &tau, const Tolerance &tol) {
  return LinearMapOnAlgebra(tau.shape(), superop_of(tau), true, tol);
}

Matrix LinearMapOnAlgebra::coordinates() const { return restrict_to_algebra(op_.matrix, shape_); }

} // namespace cpspectra
