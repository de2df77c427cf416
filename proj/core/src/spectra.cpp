#include "cpspectra/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "cpspectra/error.hpp"

namespace cpspectra {

std::string to_string(JsrMethod method) {
  return method == JsrMethod::brute ? "brute" : "tensor_power";
}

namespace {

Index tuple_side(std::span<const Matrix> tuple, const char *what) {
  if (tuple.empty()) {
    throw PreconditionError(std::string(what) + ": the tuple must not be empty");
  }
  const Index m = tuple.front().rows();
  for (const Matrix &a : tuple) {
    if (a.rows() != m || a.cols() != m) {
      throw PreconditionError(std::string(what) + ": tuple members must share one square side");
    }
    require_finite(a, what);
  }
  return m;
}

void require_strictly_positive(const Matrix &v, const Tolerance &tol, const char *what) {
  require_square(v, what);
  const PsdReport report = psd_checks(v, tol);
  if (!report.is_strictly_positive) {
    std::ostringstream os;
    os << what << ": matrix is not strictly positive (min eigenvalue " << report.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }
}

void require_in_algebra(const Matrix &x, const AlgebraShape &shape, const Tolerance &tol, const char *what) {
  if (x.rows() != shape.size() || x.cols() != shape.size() || !is_member(x, shape, tol)) {
    throw PreconditionError(std::string(what) + ": element does not belong to the algebra [" +
                            shape.to_string() + "]");
  }
}

// Superoperator of x -> a x b.
Matrix sandwich(const Matrix &a, const Matrix &b) { return kron(b.transpose(), a); }

} // namespace

double spectral_radius_map(const SuperOperator &op) { return spectral_radius(op.matrix); }

double spectral_radius_map(const LinearMapOnAlgebra &phi) { return spectral_radius(phi.coordinates()); }

double outer_radius(std::span<const Matrix> tuple) {
  const Index m = tuple_side(tuple, "outer_radius");
  Matrix s = Matrix::Zero(m * m, m * m);
  for (const Matrix &a : tuple) {
    s += kron(a.conjugate(), a);
  }
  return std::sqrt(spectral_radius(s));
}

double outer_radius_gelfand(std::span<const Matrix> tuple, int n) {
  const Index m = tuple_side(tuple, "outer_radius_gelfand");
  if (n < 1) {
    throw PreconditionError("outer_radius_gelfand: n must be at least 1");
  }
  Matrix x = Matrix::Identity(m, m);
  double log_scale = 0.0;
  for (int step = 0; step < n; ++step) {
    Matrix next = Matrix::Zero(m, m);
    for (const Matrix &a : tuple) {
      next.noalias() += a.adjoint() * x * a;
    }
    const double nrm = op_norm(next);
    if (nrm == 0.0) {
      return 0.0;
    }
    log_scale += std::log(nrm);
    x = next / nrm;
  }
  // x now has norm one, so ||tau^n(1)|| = exp(log_scale).
  return std::exp(log_scale / (2.0 * n));
}

namespace {

// Norms are tracked as logarithms: prefixes are renormalized to unit norm
// so long words neither overflow nor underflow.
struct WordStats {
  std::vector<double> max_log_norm; // indexed by length - 1
  double log_lower = -std::numeric_limits<double>::infinity();
  std::uint64_t words = 0;
};

void extend_words(std::span<const Matrix> tuple, const Matrix &prefix, double log_scale, int length, int n_max,
                  WordStats &stats) {
  const double nrm = op_norm(prefix);
  ++stats.words;
  if (nrm == 0.0) {
    return; // every extension is zero as well
  }
  const double log_norm = log_scale + std::log(nrm);
  auto &slot = stats.max_log_norm[static_cast<std::size_t>(length - 1)];
  slot = std::max(slot, log_norm);
  const Matrix unit_prefix = prefix / nrm;
  const double rho = spectral_radius(unit_prefix);
  if (rho > 0.0) {
    stats.log_lower = std::max(stats.log_lower, (log_norm + std::log(rho)) / length);
  }
  if (length == n_max) {
    return;
  }
  for (const Matrix &a : tuple) {
    extend_words(tuple, unit_prefix * a, log_norm, length + 1, n_max, stats);
  }
}

} // namespace

JsrEstimate jsr_brute(std::span<const Matrix> tuple, int n_max, const JsrBruteOptions &options) {
  tuple_side(tuple, "jsr_brute");
  if (n_max < 1) {
    throw PreconditionError("jsr_brute: n_max must be at least 1");
  }
  const double d = static_cast<double>(tuple.size());
  if (std::pow(d, n_max) > static_cast<double>(options.word_budget)) {
    std::ostringstream os;
    os << "jsr_brute: " << tuple.size() << "^" << n_max << " words exceed the budget of "
       << options.word_budget;
    throw BudgetExceeded(os.str());
  }

  const auto run_prefix = [&](std::size_t first) {
    WordStats stats;
    stats.max_log_norm.assign(static_cast<std::size_t>(n_max), -std::numeric_limits<double>::infinity());
    extend_words(tuple, tuple[first], 0.0, 1, n_max, stats);
    return stats;
  };

  std::vector<WordStats> partial;
  if (options.workers > 1 && tuple.size() > 1) {
    std::vector<std::future<WordStats>> jobs;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, run_prefix, i));
    }
    for (auto &job : jobs) {
      partial.push_back(job.get());
    }
  } else {
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      partial.push_back(run_prefix(i));
    }
  }

  JsrEstimate est;
  est.method = JsrMethod::brute;
  est.parameter = n_max;
  std::vector<double> max_log_norm(static_cast<std::size_t>(n_max), -std::numeric_limits<double>::infinity());
  double log_lower = -std::numeric_limits<double>::infinity();
  for (const WordStats &s : partial) {
    log_lower = std::max(log_lower, s.log_lower);
    est.words += s.words;
    for (std::size_t k = 0; k < max_log_norm.size(); ++k) {
      max_log_norm[k] = std::max(max_log_norm[k], s.max_log_norm[k]);
    }
  }
  est.lower = std::exp(log_lower);
  est.upper = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < max_log_norm.size(); ++k) {
    est.upper = std::min(est.upper, std::exp(max_log_norm[k] / static_cast<double>(k + 1)));
  }
  return est;
}

JsrEstimate jsr_tensor_approx(std::span<const Matrix> tuple, int k, Index superop_budget) {
  const Index m = tuple_side(tuple, "jsr_tensor_approx");
  if (k < 1) {
    throw PreconditionError("jsr_tensor_approx: k must be at least 1");
  }
  const double side = std::pow(static_cast<double>(m), 2.0 * k);
  if (side > static_cast<double>(superop_budget)) {
    std::ostringstream os;
    os << "jsr_tensor_approx: superoperator side " << m << "^" << 2 * k << " exceeds the budget of "
       << superop_budget;
    throw BudgetExceeded(os.str());
  }
  std::vector<Matrix> powers;
  powers.reserve(tuple.size());
  for (const Matrix &a : tuple) {
    powers.push_back(kron_power(a, k));
  }
  JsrEstimate est;
  est.method = JsrMethod::tensor_power;
  est.parameter = k;
  est.upper = std::pow(outer_radius(powers), 1.0 / k);
  est.lower = std::pow(static_cast<double>(tuple.size()), -1.0 / (2.0 * k)) * est.upper;
  return est;
}

double scaled_outer_radius(std::span<const Matrix> tuple, const Matrix &v, const Tolerance &tol) {
  const Index m = tuple_side(tuple, "scaled_outer_radius");
  if (v.rows() != m) {
    throw PreconditionError("scaled_outer_radius: scaling matrix side mismatch");
  }
  require_strictly_positive(v, tol, "scaled_outer_radius");
  const Matrix v_inv = inverse(v, tol);
  Matrix s = Matrix::Zero(m, m);
  for (const Matrix &a : tuple) {
    const Matrix b = v * a * v_inv;
    s.noalias() += b.adjoint() * b;
  }
  return std::sqrt(op_norm(s));
}

double friedland_value(const LinearMapOnAlgebra &phi, const Matrix &w, const Tolerance &tol) {
  require_in_algebra(w, phi.shape(), tol, "friedland_value");
  require_strictly_positive(w, tol, "friedland_value");
  return spectral_radius(inverse(w, tol) * phi(w));
}

double positive_map_norm(const LinearMapOnAlgebra &phi) {
  const Index m = phi.shape().size();
  return op_norm(phi(Matrix::Identity(m, m)));
}

NeumannWitness neumann_witness(const LinearMapOnAlgebra &phi, double s, const Tolerance &tol) {
  const double r = spectral_radius_map(phi);
  if (!(s > r + tol.rank * std::max(1.0, r))) {
    std::ostringstream os;
    os.precision(17);
    os << "neumann_witness: s = " << s << " must exceed the spectral radius " << r;
    throw PreconditionError(os.str());
  }
  const Index m = phi.shape().size();
  const Matrix coords = phi.coordinates();
  const Matrix j_mat = algebra_coordinates(phi.shape());
  const Matrix system = Matrix::Identity(coords.rows(), coords.cols()) - coords / s;
  const Vector rhs = j_mat.adjoint() * vec(Matrix::Identity(m, m));
  const Vector sol = inverse(system, tol) * rhs;

  NeumannWitness out;
  out.s = s;
  out.spectral_radius = r;
  out.w = hermitian_part(unvec(j_mat * sol));
  const Matrix one = Matrix::Identity(m, m);
  out.residual = op_norm(phi(out.w) - s * (out.w - one));
  if (out.residual > tol.conv * std::max(1.0, s * op_norm(out.w))) {
    std::ostringstream os;
    os << "neumann_witness: linear solve residual " << out.residual << " is too large";
    throw ConvergenceError(os.str());
  }
  if (phi.claimed_positive() && !psd_checks(out.w - one, tol).is_psd) {
    throw PreconditionError("neumann_witness: witness fails w >= 1 (map not positive?)");
  }
  return out;
}

LinearMapOnAlgebra conjugate_map(const LinearMapOnAlgebra &phi, const Matrix &v, const Tolerance &tol) {
  require_in_algebra(v, phi.shape(), tol, "conjugate_map");
  require_strictly_positive(v, tol, "conjugate_map");
  const Matrix v_inv = inverse(v, tol);
  const Matrix conj = sandwich(v_inv, v_inv) * phi.superop().matrix * sandwich(v, v);
  return LinearMapOnAlgebra(phi.shape(), SuperOperator(conj), phi.claimed_positive(), tol);
}

NormAchieving norm_achieving_check(const LinearMapOnAlgebra &phi, const Matrix &w, const Tolerance &tol) {
  require_in_algebra(w, phi.shape(), tol, "norm_achieving_check");
  require_strictly_positive(w, tol, "norm_achieving_check");
  const double r = spectral_radius_map(phi);
  const PsdReport gap = psd_checks(r * w - phi(w), Tolerance{tol.rank, tol.psd * std::max(1.0, r), tol.conv});
  if (!gap.is_psd) {
    std::ostringstream os;
    os << "norm_achieving_check: phi(w) <= r w fails, r w - phi(w) has eigenvalue " << gap.min_eigenvalue;
    throw PreconditionError(os.str());
  }
  NormAchieving out;
  out.spectral_radius = r;
  out.v = herm_sqrt(w, tol);
  const LinearMapOnAlgebra sigma = conjugate_map(phi, out.v, tol);
  out.norm = positive_map_norm(sigma);
  out.residual = std::abs(out.norm - r);
  out.achieved = out.residual <= 1e-8 * std::max(1.0, r);
  return out;
}

namespace {

// Applies the similarity that removes the coupling between the leading k
// rows/columns and the rest of the triangular matrix t (starting at offset o),
// accumulating x <- x S and x_inv <- S^-1 x_inv.
void decouple(Matrix &t, Matrix &x, Matrix &x_inv, Index o, Index k) {
  const Index n = t.rows();
  const Index rest = n - o - k;
  if (k == 0 || rest == 0) {
    return;
  }
  const Matrix y = solve_triangular_sylvester(t.block(o, o, k, k), t.block(o + k, o + k, rest, rest),
                                              -t.block(o, o + k, k, rest));
  // S = I + Y at block (o, o+k); S^-1 = I - Y.
  t.block(o, o + k, k, rest).setZero();
  x.block(0, o + k, n, rest) += x.block(0, o, n, k) * y;
  x_inv.block(o, 0, k, n) -= y * x_inv.block(o + k, 0, rest, n);
}

} // namespace

BalancedSimilarity balance_similarity(const Matrix &a, const BalanceOptions &options, const Tolerance &tol) {
  require_square(a, "balance_similarity");
  require_finite(a, "balance_similarity");
  const Index n = a.rows();
  const double r = spectral_radius(a);
  if (!(r > 0.0)) {
    throw PreconditionError("balance_similarity: spectral radius must be positive");
  }

  BalancedSimilarity out;
  out.spectral_radius = r;
  {
    const Matrix b = a / r;
    Matrix p = Matrix::Identity(n, n);
    out.max_normalized_power = 1.0;
    for (int k = 1; k <= options.horizon; ++k) {
      p = p * b;
      const double nrm = op_norm(p);
      out.max_normalized_power = std::max(out.max_normalized_power, nrm);
      if (nrm > options.power_bound) {
        std::ostringstream os;
        os << "balance_similarity: unbounded normalized powers, ||A^" << k << "/r^" << k << "|| = " << nrm;
        throw PreconditionError(os.str());
      }
    }
  }

  SchurForm form = schur(a);
  std::vector<Complex> diag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    diag[static_cast<std::size_t>(i)] = form.triangular(i, i);
  }
  const auto clusters = cluster_eigenvalues(diag, options.cluster_tol * r);
  // Group each cluster contiguously, in the order of `clusters`.
  for (std::size_t c = clusters.size(); c-- > 0;) {
    reorder_schur(form, [&](Complex z) { return nearest_cluster(clusters, z) == c; });
  }

  Matrix t = form.triangular;
  Matrix x = Matrix::Identity(n, n);
  Matrix x_inv = Matrix::Identity(n, n);
  std::vector<Index> offsets;
  Index o = 0;
  for (const auto &c : clusters) {
    offsets.push_back(o);
    decouple(t, x, x_inv, o, c.multiplicity);
    o += c.multiplicity;
  }

  Eigen::VectorXcd scale = Eigen::VectorXcd::Ones(n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const Index k = clusters[c].multiplicity;
    const Index start = offsets[c];
    const Matrix block = t.block(start, start, k, k);
    const double modulus = std::abs(clusters[c].center);
    const bool peripheral = modulus >= r * (1.0 - options.cluster_tol);
    if (peripheral) {
      Matrix nil = block;
      nil.diagonal().setZero();
      if (op_norm(nil) > 1e-6 * r) {
        std::ostringstream os;
        os << "balance_similarity: peripheral eigenvalue " << clusters[c].center
           << " has a nontrivial Jordan block, normalized powers are unbounded";
        throw PreconditionError(os.str());
      }
    }
    const double target = peripheral ? r * (1.0 + 1e-7) : 0.5 * (r + modulus);
    double delta = options.epsilon;
    Eigen::VectorXcd d(k);
    for (int attempt = 0; attempt < 200; ++attempt) {
      for (Index i = 0; i < k; ++i) {
        d(i) = std::pow(delta, static_cast<double>(i));
      }
      const Matrix scaled = d.cwiseInverse().asDiagonal() * block * d.asDiagonal();
      if (op_norm(scaled) <= target) {
        break;
      }
      delta *= 0.5;
    }
    scale.segment(start, k) = d;
  }

  const Matrix p_inv = form.unitary * x * scale.asDiagonal();
  const Matrix p = scale.cwiseInverse().asDiagonal() * x_inv * form.unitary.adjoint();
  out.p = p;
  out.p_inverse = p_inv;
  out.norm = op_norm(p * a * p_inv);
  (void)tol;
  return out;
}

Matrix singular_psd_combination(const Matrix &w1, const Matrix &w2, const Tolerance &tol) {
  require_square(w1, "singular_psd_combination");
  if (w2.rows() != w1.rows() || w2.cols() != w1.cols()) {
    throw PreconditionError("singular_psd_combination: side mismatch");
  }
  const PsdReport r1 = psd_checks(w1, tol);
  const PsdReport r2 = psd_checks(w2, tol);
  if (!r1.is_psd || !r2.is_psd) {
    throw PreconditionError("singular_psd_combination: inputs must be positive semidefinite");
  }
  Matrix pair(w1.size(), 2);
  pair.col(0) = Eigen::Map<const Vector>(w1.data(), w1.size());
  pair.col(1) = Eigen::Map<const Vector>(w2.data(), w2.size());
  if (rank_tol(pair, tol.rank) < 2) {
    throw PreconditionError("singular_psd_combination: inputs are linearly dependent");
  }
  if (!r1.is_strictly_positive) {
    return w1;
  }
  if (!r2.is_strictly_positive) {
    return w2;
  }
  const Matrix root_inv = inverse(herm_sqrt(w1, tol), tol);
  const double d = spectral_radius(root_inv * w2 * root_inv);
  return hermitian_part(w1 - w2 / d);
}

} // namespace cpspectra
