#include "cpspectra/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpspectra/error.hpp"

namespace cpspectra {

namespace {

constexpr double tiny = std::numeric_limits<double>::min();

// Eigenvalues of a Schur form's diagonal.
std::vector<Complex> schur_diagonal(const SchurForm &form) {
  std::vector<Complex> out;
  for (Index i = 0; i < form.triangular.rows(); ++i) {
    out.push_back(form.triangular(i, i));
  }
  return out;
}

Index degeneracy_index(const SchurForm &base, const std::vector<EigenvalueCluster> &clusters, std::size_t c,
                       double scale, double plateau_tol) {
  const Index k = clusters[c].multiplicity;
  if (k == 1) {
    return 1;
  }
  SchurForm form = base;
  reorder_schur(form, [&](Complex z) { return nearest_cluster(clusters, z) == c; });
  Matrix shifted = form.triangular.topLeftCorner(k, k);
  shifted.diagonal().array() -= clusters[c].center;
  Matrix p = Matrix::Identity(k, k);
  Index previous = k;
  for (Index j = 1; j <= k; ++j) {
    p = p * shifted;
    const Index rank = rank_abs(p, plateau_tol * std::pow(scale, static_cast<double>(j)));
    if (rank == previous) {
      return std::max<Index>(1, j - 1);
    }
    if (rank == 0) {
      return j;
    }
    previous = rank;
  }
  return k;
}

bool is_peripheral(Complex z, double r, double cluster_tol) { return std::abs(z) >= r - 2.0 * cluster_tol * r; }

} // namespace

SpectralStructure spectral_structure(const Matrix &t, const SpectralOptions &options) {
  require_square(t, "spectral_structure");
  require_finite(t, "spectral_structure");
  SpectralStructure out;
  if (t.rows() == 0) {
    return out;
  }
  const SchurForm form = schur(t);
  const std::vector<Complex> values = schur_diagonal(form);
  for (Complex z : values) {
    out.r = std::max(out.r, std::abs(z));
  }
  const double scale = std::max(op_norm(t), tiny);
  const double abs_tol = options.cluster_tol * (out.r > 0.0 ? out.r : scale);
  const auto clusters = cluster_eigenvalues(values, abs_tol);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const Index index = degeneracy_index(form, clusters, c, scale, options.plateau_tol);
    out.eigenvalues.push_back({clusters[c].center, clusters[c].multiplicity, index});
    if (is_peripheral(clusters[c].center, out.r, options.cluster_tol)) {
      out.d_max = std::max(out.d_max, index);
    }
  }
  for (const auto &e : out.eigenvalues) {
    if (is_peripheral(e.value, out.r, options.cluster_tol) && e.degeneracy_index == out.d_max) {
      out.maximal_spectrum.push_back(e.value);
    }
  }
  return out;
}

SpectralStructure spectral_structure(const SuperOperator &op, const SpectralOptions &options) {
  return spectral_structure(op.matrix, options);
}

SpectralStructure spectral_structure(const LinearMapOnAlgebra &phi, const SpectralOptions &options) {
  return spectral_structure(phi.coordinates(), options);
}

namespace {

// (sum_{n=1}^N b^n, b^N) in O(log N) products.
std::pair<Matrix, Matrix> geometric_sum(const Matrix &b, std::uint64_t n) {
  if (n == 1) {
    return {b, b};
  }
  if (n % 2 == 0) {
    auto [s, p] = geometric_sum(b, n / 2);
    Matrix sum = s + p * s;
    Matrix pw = p * p;
    return {std::move(sum), std::move(pw)};
  }
  auto [s, p] = geometric_sum(b, n - 1);
  Matrix pw = p * b;
  s += pw;
  return {std::move(s), std::move(pw)};
}

// lcm(1..12): every peripheral rotation of period <= 12 sums to zero over
// a multiple of this length.
constexpr std::uint64_t cesaro_start = 27720;

struct CesaroResult {
  Matrix mean;
  std::uint64_t terms = 0;
  bool converged = false;
};

// Mean of (t/r)^n over n = 1..N, Richardson-extrapolated in 1/N and doubled
// until it settles.
CesaroResult cesaro_simple(const Matrix &t, double r, const Tolerance &tol, int max_doublings) {
  const Matrix b = t / r;
  auto [sum, pw] = geometric_sum(b, cesaro_start);
  std::uint64_t n = cesaro_start;
  Matrix mean = sum / static_cast<double>(n);
  std::optional<Matrix> previous;
  CesaroResult out;
  for (int step = 0; step <= max_doublings; ++step) {
    sum += pw * sum;
    pw = pw * pw;
    n *= 2;
    const Matrix next_mean = sum / static_cast<double>(n);
    Matrix extrapolated = 2.0 * next_mean - mean;
    mean = next_mean;
    if (previous) {
      const double change = op_norm(extrapolated - *previous);
      if (change <= tol.conv * std::max(1.0, op_norm(extrapolated))) {
        out.mean = std::move(extrapolated);
        out.terms = n;
        out.converged = true;
        return out;
      }
    }
    previous = std::move(extrapolated);
  }
  out.mean = *previous;
  out.terms = n;
  return out;
}

double binomial(std::uint64_t n, Index k) {
  double out = 1.0;
  for (Index i = 0; i < k; ++i) {
    out *= static_cast<double>(n - static_cast<std::uint64_t>(i)) / static_cast<double>(i + 1);
  }
  return out;
}

// Mean of T^n / (C(n, d-1) r^(n-d+1)); terms with C(n, d-1) = 0 count as zero.
CesaroResult cesaro_weighted(const Matrix &t, double r, Index d, const Tolerance &tol, std::uint64_t max_terms) {
  const Index dim = t.rows();
  const Matrix b = t / r;
  Matrix pw = Matrix::Identity(dim, dim);
  Matrix sum = Matrix::Zero(dim, dim);
  const double lift = std::pow(r, static_cast<double>(d - 1));
  std::optional<Matrix> previous;
  std::uint64_t checkpoint = 64;
  CesaroResult out;
  for (std::uint64_t n = 1; n <= max_terms; ++n) {
    pw = pw * b;
    if (n >= static_cast<std::uint64_t>(d - 1)) {
      sum += pw * (lift / binomial(n, d - 1));
    }
    if (n == checkpoint) {
      Matrix mean = sum / static_cast<double>(n);
      if (previous && op_norm(mean - *previous) <= tol.conv * std::max(1.0, op_norm(mean))) {
        out.mean = std::move(mean);
        out.terms = n;
        out.converged = true;
        return out;
      }
      previous = std::move(mean);
      checkpoint *= 2;
    }
  }
  out.mean = sum / static_cast<double>(max_terms);
  out.terms = max_terms;
  return out;
}

} // namespace

MaximalPart maximal_part(const Matrix &t, const Tolerance &tol, const MaximalPartOptions &options) {
  const SpectralStructure spec = spectral_structure(t, options.spectral);
  const Index n = t.rows();
  const double scale = op_norm(t);
  if (!(spec.r > tol.rank * scale) || spec.r == 0.0) {
    throw PreconditionError("maximal_part: spectral radius is zero, the maximal part is undefined");
  }
  MaximalPart out;
  out.r = spec.r;
  out.d = spec.d_max;

  const std::vector<Complex> values = eigenvalues(t);
  const auto clusters = cluster_eigenvalues(values, options.spectral.cluster_tol * spec.r);
  std::optional<std::size_t> r_cluster;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (std::abs(clusters[c].center - spec.r) <= 2.0 * options.spectral.cluster_tol * spec.r) {
      r_cluster = c;
      break;
    }
  }
  if (r_cluster) {
    const Matrix projector =
        spectral_projector(t, [&](Complex z) { return nearest_cluster(clusters, z) == *r_cluster; });
    Matrix shifted = t;
    shifted.diagonal().array() -= spec.r;
    out.coordinates = power(shifted, static_cast<std::uint64_t>(out.d - 1)) * projector;
  } else {
    out.coordinates = Matrix::Zero(n, n);
  }

  const Matrix sq = out.coordinates * out.coordinates;
  out.idempotent_residual = op_norm(sq - out.coordinates);
  out.square_residual = op_norm(sq);
  out.idempotent = out.d == 1;
  out.commutation_residual = std::max(op_norm(t * out.coordinates - spec.r * out.coordinates),
                                      op_norm(out.coordinates * t - spec.r * out.coordinates));

  if (options.cross_check) {
    const CesaroResult ces = out.d == 1 ? cesaro_simple(t, spec.r, tol, options.max_doublings)
                                        : cesaro_weighted(t, spec.r, out.d, tol, options.max_terms);
    out.cesaro_converged = ces.converged;
    out.cesaro_terms = ces.terms;
    out.route_agreement = op_norm(ces.mean - out.coordinates);
    if (out.d == 1 && !ces.converged) {
      std::ostringstream os;
      os << "maximal_part: Cesaro mean did not settle after " << ces.terms << " terms";
      throw ConvergenceError(os.str());
    }
  }
  if (exact_sqrt(n) >= 0) {
    out.superop = SuperOperator(out.coordinates);
  }
  return out;
}

MaximalPart maximal_part(const LinearMapOnAlgebra &phi, const Tolerance &tol, const MaximalPartOptions &options) {
  MaximalPart out = maximal_part(phi.coordinates(), tol, options);
  const Matrix j = algebra_coordinates(phi.shape());
  out.superop = SuperOperator(j * out.coordinates * j.adjoint());
  return out;
}

PerronVector perron_vector(const LinearMapOnAlgebra &phi, const Tolerance &tol, const MaximalPartOptions &options) {
  const MaximalPart mp = maximal_part(phi, tol, options);
  const Index m = phi.shape().size();
  const Matrix raw = mp.superop.apply(Matrix::Identity(m, m));
  const double size = raw.norm();
  if (!(size > 0.0)) {
    throw PreconditionError("perron_vector: the maximal part vanishes at the unit");
  }
  PerronVector out{AlgebraElement(phi.shape(), hermitian_part(raw), tol), mp.r, 0.0, {}};
  const Matrix &l = out.l.matrix();
  out.residual = (phi(l) - mp.r * l).norm() / l.norm();
  out.positivity = psd_checks(l, tol);
  return out;
}

MaximalFactorization maximal_factorization(const CpMap &tau, const Tolerance &tol, const MaximalPartOptions &options) {
  const Irreducibility irr = irreducible_cp(tau, tol);
  if (!irr.irreducible) {
    std::ostringstream os;
    os << "maximal_factorization: map is reducible (generated algebra has dimension " << irr.dimension
       << " < " << irr.target << ")";
    throw PreconditionError(os.str());
  }
  const LinearMapOnAlgebra phi = LinearMapOnAlgebra::from_cp(tau, tol);
  const MaximalPart mp = maximal_part(phi, tol, options);
  const Index rank = rank_tol(mp.coordinates, 1e-8);
  if (rank != 1) {
    std::ostringstream os;
    os << "maximal_factorization: maximal part has rank " << rank << ", expected 1";
    throw PreconditionError(os.str());
  }
  const Index m = tau.side();
  const Matrix &s = mp.superop.matrix;
  const Matrix l = hermitian_part(mp.superop.apply(Matrix::Identity(m, m)));
  const Vector vl = vec(l);
  // phi-hat = vec(L) rho^T with psi(X) = rho^T vec(X) = trace(R X), rho = vec(R^T).
  const Eigen::RowVectorXcd rho = vl.adjoint() * s / vl.squaredNorm();
  Matrix density = unvec(rho.transpose()).transpose();
  const Complex t = (density * l).trace();
  density /= t;

  MaximalFactorization out{density, AlgebraElement(tau.shape(), l, tol), mp.r};
  out.trace_rl = std::abs((density * l).trace());
  out.eigen_residual = op_norm(tau(l) - mp.r * l);
  Matrix dual = Matrix::Zero(m, m);
  for (const Matrix &a : tau.kraus()) {
    dual.noalias() += a * density * a.adjoint();
  }
  out.adjoint_residual = op_norm(compress(dual, tau.shape()).matrix() - mp.r * density);
  out.rank_one_residual = op_norm(s - vl * vec(density.transpose()).transpose());
  out.hermiticity_defect = op_norm(density - density.adjoint());
  const PsdReport report = psd_checks(density, tol);
  out.faithful = report.is_strictly_positive;
  out.min_eigenvalue = report.min_eigenvalue;
  return out;
}

namespace {

// Gram-Schmidt accumulator over vec-space with one re-orthogonalization pass.
class OrthoBasis {
public:
  explicit OrthoBasis(Index m) : m_(m) {}

  bool add(const Matrix &x, double reference, double rel_tol) {
    if (static_cast<Index>(basis_.size()) == m_ * m_) {
      return false;
    }
    Vector v = vec(x);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector &b : basis_) {
        v -= b.dot(v) * b;
      }
    }
    const double nrm = v.norm();
    if (!(nrm > rel_tol * std::max(reference, tiny))) {
      return false;
    }
    basis_.push_back(v / nrm);
    return true;
  }

  const std::vector<Vector> &vectors() const { return basis_; }

private:
  Index m_;
  std::vector<Vector> basis_;
};

} // namespace

GeneratedAlgebra algebra_basis(std::span<const Matrix> tuple, bool unital, const Tolerance &tol) {
  if (tuple.empty()) {
    throw PreconditionError("algebra_basis: the tuple must not be empty");
  }
  const Index m = tuple.front().rows();
  for (const Matrix &a : tuple) {
    if (a.rows() != m || a.cols() != m) {
      throw PreconditionError("algebra_basis: tuple members must share one square side");
    }
    require_finite(a, "algebra_basis");
  }
  OrthoBasis basis(m);
  GeneratedAlgebra out;
  std::vector<Matrix> frontier;
  Index level = 0;
  if (unital) {
    const Matrix one = Matrix::Identity(m, m);
    basis.add(one, one.norm(), tol.rank);
    frontier.push_back(unvec(basis.vectors().back()));
  } else {
    level = 1;
    for (const Matrix &a : tuple) {
      if (basis.add(a, a.norm(), tol.rank)) {
        frontier.push_back(unvec(basis.vectors().back()));
        out.stabilization_index = 1;
      }
    }
  }
  while (!frontier.empty()) {
    ++level;
    std::vector<Matrix> next;
    for (const Matrix &b : frontier) {
      for (const Matrix &a : tuple) {
        if (basis.add(a * b, a.norm(), tol.rank)) {
          next.push_back(unvec(basis.vectors().back()));
        }
      }
    }
    if (!next.empty()) {
      out.stabilization_index = level;
    }
    frontier = std::move(next);
  }
  out.space.m = m;
  for (const Vector &v : basis.vectors()) {
    out.space.basis.push_back(unvec(v));
  }
  return out;
}

Irreducibility irreducible_cp(const CpMap &tau, const Tolerance &tol) {
  const CpMap ext = canonical_extension(tau, tol);
  const Index m = ext.side();
  const GeneratedAlgebra alg = algebra_basis(ext.kraus(), false, tol);
  Irreducibility out;
  out.dimension = alg.space.dimension();
  out.target = m * m;
  out.irreducible = out.dimension == out.target;
  if (!out.irreducible) {
    double best = -1.0;
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < m; ++i) {
        Matrix r = unit(m, i, j);
        for (const Matrix &b : alg.space.basis) {
          r -= hs_inner(b, r) * b;
        }
        const double nrm = r.norm();
        if (nrm > best) {
          best = nrm;
          out.witness = r / nrm;
        }
      }
    }
  }
  return out;
}

namespace {

Vector random_vector(Index n, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = Complex(normal(rng), normal(rng));
  }
  return v;
}

} // namespace

PositivityProbe strict_positivity_probe(const CpMap &tau, std::mt19937_64 &rng, int probes, const Tolerance &tol) {
  const CpMap ext = canonical_extension(tau, tol);
  const Index m = ext.side();
  const AlgebraShape &shape = tau.shape();
  const Matrix s = superop_of(ext).matrix;
  const Matrix q = power(Matrix(Matrix::Identity(m * m, m * m) + s), static_cast<std::uint64_t>(m - 1));
  std::uniform_int_distribution<Index> pick(0, shape.block_count() - 1);
  PositivityProbe out;
  out.strictly_positive = true;
  out.min_ratio = std::numeric_limits<double>::infinity();
  // Basis vectors first: they are the inputs most likely to stay singular.
  const int total = static_cast<int>(m) + probes;
  out.probes = total;
  for (int k = 0; k < total; ++k) {
    Vector v = Vector::Zero(m);
    if (k < m) {
      v(k) = 1.0;
    } else {
      const Index block = pick(rng);
      v.segment(shape.offset(block), shape.blocks()[static_cast<std::size_t>(block)]) =
          random_vector(shape.blocks()[static_cast<std::size_t>(block)], rng);
    }
    const Matrix y = hermitian_part(unvec(q * vec(v * v.adjoint())));
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(y, Eigen::EigenvaluesOnly).eigenvalues();
    const double top = ev(ev.size() - 1);
    const double ratio = top > 0.0 ? ev(0) / top : -1.0;
    out.min_ratio = std::min(out.min_ratio, ratio);
    if (!(ratio > tol.psd)) {
      out.strictly_positive = false;
    }
  }
  return out;
}

ResolventMaps resolvent_gamma(const CpMap &tau, std::optional<double> b, const Tolerance &tol) {
  const Matrix t = superop_of(tau).matrix;
  const double r = spectral_radius(t);
  const double bb = b.value_or(1.0 / (2.0 * std::max(1.0, r)));
  if (!(bb > 0.0) || !(bb * r < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "resolvent_gamma: need b > 0 and b r(tau) < 1, got b = " << bb << ", r = " << r;
    throw PreconditionError(os.str());
  }
  const Matrix id = Matrix::Identity(t.rows(), t.cols());
  const Matrix g0 = inverse(id - bb * t, tol);
  return {SuperOperator(g0), SuperOperator(g0 - id), bb};
}

ResolventMaps exp_eta(const CpMap &tau, double d) {
  if (!(d > 0.0)) {
    throw PreconditionError("exp_eta: the coefficient d must be positive");
  }
  const Matrix t = superop_of(tau).matrix;
  const Matrix e0 = mat_exp(d * t);
  const Matrix id = Matrix::Identity(t.rows(), t.cols());
  return {SuperOperator(e0), SuperOperator(e0 - id), d};
}

IdealCheck maximal_ideal_check(const CpMap &tau, const Tolerance &tol, double threshold,
                               const MaximalPartOptions &options) {
  const CpMap ext = canonical_extension(tau, tol);
  const LinearMapOnAlgebra phi = LinearMapOnAlgebra::from_cp(ext, tol);
  const MaximalPart mp = maximal_part(phi, tol, options);
  const CoefficientSpace span = coefficient_space_of_choi(hermitian_part(choi_of(mp.superop)), tol);
  const GeneratedAlgebra alg = algebra_basis(ext.kraus(), false, tol);

  IdealCheck out;
  out.dimension = span.dimension();
  for (const Matrix &bi : span.basis) {
    for (const Matrix &bj : span.basis) {
      out.product_residual = std::max(out.product_residual, span.residual(bi * bj));
    }
    for (const Matrix &a : ext.kraus()) {
      const double scale = std::max(a.norm(), tiny);
      out.left_residual = std::max(out.left_residual, span.residual(a * bi) / scale);
      out.right_residual = std::max(out.right_residual, span.residual(bi * a) / scale);
    }
    out.containment_residual = std::max(out.containment_residual, alg.space.residual(bi));
  }
  out.is_subalgebra = out.dimension > 0 && out.product_residual <= threshold;
  out.is_ideal = out.is_subalgebra && out.left_residual <= threshold && out.right_residual <= threshold &&
                 out.containment_residual <= threshold;
  return out;
}

std::optional<Matrix> common_invariant_subspace(std::span<const Matrix> tuple, std::mt19937_64 &rng,
                                                const Tolerance &tol, int samples) {
  const GeneratedAlgebra alg = algebra_basis(tuple, true, tol);
  const Index m = alg.space.m;
  std::optional<Matrix> best;
  for (int s = 0; s < samples; ++s) {
    const Vector c = random_vector(alg.space.dimension(), rng);
    Matrix x = Matrix::Zero(m, m);
    for (Index k = 0; k < c.size(); ++k) {
      x += c(k) * alg.space.basis[static_cast<std::size_t>(k)];
    }
    Eigen::ComplexEigenSolver<Matrix> solver(x);
    if (solver.info() != Eigen::Success) {
      continue;
    }
    for (Index e = 0; e < m; ++e) {
      const Vector v = solver.eigenvectors().col(e);
      Matrix orbit(m, alg.space.dimension());
      for (Index k = 0; k < orbit.cols(); ++k) {
        orbit.col(k) = alg.space.basis[static_cast<std::size_t>(k)] * v;
      }
      const Matrix q = orthonormal_range(orbit, 1e-8);
      if (q.cols() > 0 && q.cols() < m && (!best || q.cols() < best->cols())) {
        best = q;
      }
    }
  }
  return best;
}

} // namespace cpspectra
