#ifndef CPSPECTRA_MATS_HPP
#define CPSPECTRA_MATS_HPP

// Dense complex linear-algebra kernel shared by every other module.
//
// Vectorization convention (used by every superoperator in the library):
// column stacking, vec(E_ij) = e_{i + j*m} with 0-based i, j.  Under this
// convention vec(A X B) = (B^T kron A) vec(X).

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cpspectra {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Numerical thresholds threaded through the library.
struct Tolerance {
  double rank = 1e-9; ///< relative singular-value threshold
  double psd = 1e-9;  ///< eigenvalue floor for positivity tests
  double conv = 1e-10; ///< iteration stopping / residual threshold
};

/// Throws PreconditionError if any entry is NaN or infinite.
void require_finite(const Matrix &m, const char *what);
void require_square(const Matrix &m, const char *what);

/// Elementary matrix unit E_ij of side m (0-based indices).
Matrix unit(Index m, Index i, Index j);

Matrix kron(const Matrix &a, const Matrix &b);
/// a kron a kron ... (k factors), k >= 1.
Matrix kron_power(const Matrix &a, int k);

/// Column-stacking vectorization of a square matrix.
Vector vec(const Matrix &a);
/// Inverse of vec; the length of v must be a perfect square.
Matrix unvec(const Vector &v);
/// Integer square root of n if n is a perfect square, otherwise -1.
Index exact_sqrt(Index n);

/// Eigenvalues with algebraic multiplicity (Schur based), any order.
std::vector<Complex> eigenvalues(const Matrix &m);
double spectral_radius(const Matrix &m);

Eigen::VectorXd singular_values(const Matrix &m);
/// Operator (spectral) norm.
double op_norm(const Matrix &m);

/// Number of singular values above rel_tol times the largest one.
Index rank_tol(const Matrix &m, double rel_tol);
/// Number of singular values above an absolute threshold.
Index rank_abs(const Matrix &m, double threshold);

/// Orthonormal basis (as columns) of the column space of m, using the
/// relative rank threshold.
Matrix orthonormal_range(const Matrix &m, double rel_tol);

struct PsdReport {
  bool is_hermitian = false;
  bool is_psd = false;
  bool is_strictly_positive = false;
  double min_eigenvalue = 0.0;
  double hermiticity_defect = 0.0; ///< ||M - M*||
};

/// Positivity diagnostics. The matrix is symmetrized before the
/// eigenvalue floor is applied.
PsdReport psd_checks(const Matrix &m, const Tolerance &tol = {});

/// (M + M*) / 2
Matrix hermitian_part(const Matrix &m);

Matrix herm_sqrt(const Matrix &m, const Tolerance &tol = {});
Matrix inverse(const Matrix &m, const Tolerance &tol = {});
Matrix mat_exp(const Matrix &m);
/// m^n by repeated squaring; m^0 = I.
Matrix power(const Matrix &m, std::uint64_t n);

/// Complex Schur form m = unitary * triangular * unitary^*.
struct SchurForm {
  Matrix unitary;
  Matrix triangular;
};

SchurForm schur(const Matrix &m);

/// Reorders a Schur form so that the eigenvalues accepted by `select`
/// occupy the leading diagonal positions. Returns how many were moved.
Index reorder_schur(SchurForm &form, const std::function<bool(Complex)> &select);

/// Solves A Y - Y B = C for upper-triangular A and B with disjoint spectra.
Matrix solve_triangular_sylvester(const Matrix &a, const Matrix &b, const Matrix &c);

/// Riesz projector onto the generalized eigenspace of the selected
/// eigenvalues, along the complementary invariant subspace.
Matrix spectral_projector(const Matrix &m, const std::function<bool(Complex)> &select);

struct EigenvalueCluster {
  Complex center;     ///< mean of the members
  Index multiplicity = 0;
};

/// Single-linkage clustering of eigenvalues closer than abs_tol, ordered by
/// decreasing modulus of the center.
std::vector<EigenvalueCluster> cluster_eigenvalues(const std::vector<Complex> &values, double abs_tol);

/// Index of the cluster whose center is nearest to z.
std::size_t nearest_cluster(const std::vector<EigenvalueCluster> &clusters, Complex z);

/// Frobenius (Hilbert-Schmidt) inner product trace(a^* b).
Complex hs_inner(const Matrix &a, const Matrix &b);

} // namespace cpspectra

#endif
