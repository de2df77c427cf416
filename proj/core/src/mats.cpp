#include "cpspectra/mats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cpspectra/error.hpp"

namespace cpspectra {

void require_finite(const Matrix &m, const char *what) {
  if (!m.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
  }
}

void require_square(const Matrix &m, const char *what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw PreconditionError(os.str());
  }
}

Matrix unit(Index m, Index i, Index j) {
  Matrix e = Matrix::Zero(m, m);
  e(i, j) = 1.0;
  return e;
}

Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron_power(const Matrix &a, int k) {
  if (k < 1) {
    throw PreconditionError("kron_power: exponent must be at least 1");
  }
  Matrix out = a;
  for (int i = 1; i < k; ++i) {
    out = kron(out, a);
  }
  return out;
}

Vector vec(const Matrix &a) {
  require_square(a, "vec");
  // Eigen storage is column-major, so this is exactly column stacking.
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Index exact_sqrt(Index n) {
  if (n < 0) {
    return -1;
  }
  auto r = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) {
    --r;
  }
  while ((r + 1) * (r + 1) <= n) {
    ++r;
  }
  return r * r == n ? r : -1;
}

Matrix unvec(const Vector &v) {
  const Index m = exact_sqrt(v.size());
  if (m < 0) {
    throw PreconditionError("unvec: length is not a perfect square");
  }
  return Eigen::Map<const Matrix>(v.data(), m, m);
}

std::vector<Complex> eigenvalues(const Matrix &m) {
  require_square(m, "eigenvalues");
  require_finite(m, "eigenvalues");
  if (m.size() == 0) {
    return {};
  }
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eigenvalues: Schur iteration did not converge");
  }
  const Vector &ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const Matrix &m) {
  double r = 0.0;
  for (const Complex &z : eigenvalues(m)) {
    r = std::max(r, std::abs(z));
  }
  return r;
}

Eigen::VectorXd singular_values(const Matrix &m) {
  if (m.size() == 0) {
    return {};
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

double op_norm(const Matrix &m) {
  if (m.size() == 0) {
    return 0.0;
  }
  return singular_values(m)(0);
}

Index rank_abs(const Matrix &m, double threshold) {
  const Eigen::VectorXd sv = singular_values(m);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) {
      ++r;
    }
  }
  return r;
}

Index rank_tol(const Matrix &m, double rel_tol) {
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) {
    return 0;
  }
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) {
      ++r;
    }
  }
  return r;
}

Matrix orthonormal_range(const Matrix &m, double rel_tol) {
  if (m.size() == 0) {
    return Matrix(m.rows(), 0);
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd &sv = svd.singularValues();
  Index r = 0;
  if (sv(0) > 0.0) {
    while (r < sv.size() && sv(r) > rel_tol * sv(0)) {
      ++r;
    }
  }
  return svd.matrixU().leftCols(r);
}

Matrix hermitian_part(const Matrix &m) { return 0.5 * (m + m.adjoint()); }

PsdReport psd_checks(const Matrix &m, const Tolerance &tol) {
  require_square(m, "psd_checks");
  PsdReport report;
  if (m.size() == 0) {
    report.is_hermitian = report.is_psd = report.is_strictly_positive = true;
    return report;
  }
  report.hermiticity_defect = op_norm(m - m.adjoint());
  report.is_hermitian = report.hermiticity_defect <= tol.psd * op_norm(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues()(0);
  report.is_psd = report.is_hermitian && report.min_eigenvalue >= -tol.psd;
  report.is_strictly_positive = report.is_hermitian && report.min_eigenvalue > tol.psd;
  return report;
}

Matrix herm_sqrt(const Matrix &m, const Tolerance &tol) {
  const PsdReport report = psd_checks(m, tol);
  if (!report.is_psd) {
    std::ostringstream os;
    os << "herm_sqrt: input is not positive semidefinite (min eigenvalue "
       << report.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix &u = solver.eigenvectors();
  return u * roots.cast<Complex>().asDiagonal() * u.adjoint();
}

Matrix inverse(const Matrix &m, const Tolerance &tol) {
  require_square(m, "inverse");
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0) {
    return m;
  }
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= tol.rank * sv(0)) {
    throw PreconditionError("inverse: matrix is numerically singular");
  }
  return m.partialPivLu().inverse();
}

Matrix mat_exp(const Matrix &m) {
  require_square(m, "mat_exp");
  return m.exp();
}

Matrix power(const Matrix &m, std::uint64_t n) {
  require_square(m, "power");
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix base = m;
  while (n > 0) {
    if (n & 1U) {
      result = result * base;
    }
    n >>= 1U;
    if (n > 0) {
      base = base * base;
    }
  }
  return result;
}

SchurForm schur(const Matrix &m) {
  require_square(m, "schur");
  if (m.size() == 0) {
    return {m, m};
  }
  Eigen::ComplexSchur<Matrix> cs(m, /*computeU=*/true);
  if (cs.info() != Eigen::Success) {
    throw ConvergenceError("schur: QR iteration did not converge");
  }
  return {cs.matrixU(), cs.matrixT()};
}

namespace {

// Swaps the adjacent diagonal entries p, p+1 of the triangular factor by a
// unitary rotation whose first column is the eigenvector of the 2x2 block
// belonging to the lower eigenvalue.
void swap_adjacent(SchurForm &form, Index p) {
  Matrix &t = form.triangular;
  const Index n = t.rows();
  const Complex a = t(p, p);
  const Complex b = t(p + 1, p + 1);
  const Complex c = t(p, p + 1);
  const Complex x1 = c;
  const Complex x2 = b - a;
  const double nx = std::hypot(std::abs(x1), std::abs(x2));
  if (nx == 0.0) {
    return;
  }
  Eigen::Matrix2cd g;
  g << x1 / nx, -std::conj(x2) / nx, x2 / nx, std::conj(x1) / nx;
  t.block(p, p, 2, n - p) = g.adjoint() * t.block(p, p, 2, n - p);
  t.block(0, p, p + 2, 2) = t.block(0, p, p + 2, 2) * g;
  form.unitary.middleCols(p, 2) = form.unitary.middleCols(p, 2) * g;
  t(p + 1, p) = 0.0;
}

} // namespace

Index reorder_schur(SchurForm &form, const std::function<bool(Complex)> &select) {
  const Index n = form.triangular.rows();
  Index front = 0;
  for (Index j = 0; j < n; ++j) {
    if (!select(form.triangular(j, j))) {
      continue;
    }
    for (Index p = j - 1; p >= front; --p) {
      swap_adjacent(form, p);
    }
    ++front;
  }
  return front;
}

Matrix solve_triangular_sylvester(const Matrix &a, const Matrix &b, const Matrix &c) {
  const Index na = a.rows();
  const Index nb = b.rows();
  Matrix y(na, nb);
  for (Index j = 0; j < nb; ++j) {
    Vector rhs = c.col(j);
    for (Index l = 0; l < j; ++l) {
      rhs += y.col(l) * b(l, j);
    }
    Matrix shifted = a;
    shifted.diagonal().array() -= b(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

Matrix spectral_projector(const Matrix &m, const std::function<bool(Complex)> &select) {
  SchurForm form = schur(m);
  const Index n = m.rows();
  const Index k = reorder_schur(form, select);
  if (k == 0) {
    return Matrix::Zero(n, n);
  }
  if (k == n) {
    return Matrix::Identity(n, n);
  }
  const Matrix &t = form.triangular;
  const Matrix y = solve_triangular_sylvester(t.topLeftCorner(k, k), t.bottomRightCorner(n - k, n - k),
                                              -t.topRightCorner(k, n - k));
  Matrix p = Matrix::Zero(n, n);
  p.topLeftCorner(k, k).setIdentity();
  p.topRightCorner(k, n - k) = -y;
  return form.unitary * p * form.unitary.adjoint();
}

std::vector<EigenvalueCluster> cluster_eigenvalues(const std::vector<Complex> &values, double abs_tol) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) {
    parent[i] = i;
  }
  const auto find = [&parent](std::size_t i) {
    while (parent[i] != i) {
      i = parent[i] = parent[parent[i]];
    }
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= abs_tol) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<EigenvalueCluster> clusters;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      clusters.push_back({values[i], 1});
    } else {
      auto &c = clusters[static_cast<std::size_t>(it - roots.begin())];
      c.center += values[i];
      ++c.multiplicity;
    }
  }
  for (auto &c : clusters) {
    c.center /= static_cast<double>(c.multiplicity);
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const auto &a, const auto &b) {
    if (std::abs(a.center) != std::abs(b.center)) {
      return std::abs(a.center) > std::abs(b.center);
    }
    return std::arg(a.center) < std::arg(b.center);
  });
  return clusters;
}

std::size_t nearest_cluster(const std::vector<EigenvalueCluster> &clusters, Complex z) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < clusters.size(); ++k) {
    if (std::abs(clusters[k].center - z) < std::abs(clusters[best].center - z)) {
      best = k;
    }
  }
  return best;
}

Complex hs_inner(const Matrix &a, const Matrix &b) { return a.conjugate().cwiseProduct(b).sum(); }

} // namespace cpspectra
