// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Sub-check details follow each line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cpspectra/perron.hpp"
#include "cpspectra/reference_maps.hpp"
#include "cpspectra/spectra.hpp"
#include "test_support.hpp"

using namespace cpspectra;
using cpspectra::testing::random_cp_map;
using cpspectra::testing::random_matrix;
using cpspectra::testing::random_tuple;

namespace {

const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
const double root2 = std::sqrt(2.0);

class Criterion {
public:
  void check(bool ok, const std::string &what) {
    pass_ = pass_ && ok;
    details_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + what);
  }
  void note(const std::string &what) { details_.push_back("    note " + what); }
  bool passed() const { return pass_; }
  const std::vector<std::string> &details() const { return details_; }

private:
  bool pass_ = true;
  std::vector<std::string> details_;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Largest entrywise gap between phi-hat and a closed form on the matrix units
// of the algebra.
double formula_gap(const MaximalPart &mp, const AlgebraShape &shape, const std::function<Matrix(const Matrix &)> &f) {
  double gap = 0.0;
  const Index m = shape.size();
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const Matrix e = unit(m, i, j);
      if (!is_member(e, shape)) {
        continue;
      }
      gap = std::max(gap, max_abs(mp.superop.apply(e) - f(e)));
    }
  }
  return gap;
}

void criterion1(Criterion &c) {
  const CpMap tau = fibonacci_map();
  const auto phi = LinearMapOnAlgebra::from_cp(tau);
  const double r = spectral_radius_map(phi);
  c.check(std::abs(r - golden) <= 1e-9, "r = golden ratio, gap " + sci(std::abs(r - golden)));
  const MaximalPart mp = maximal_part(phi);
  const double gap = formula_gap(mp, tau.shape(), [](const Matrix &x) {
    const Complex f = (x(0, 0) + (golden - 1.0) * x(1, 1) + x(2, 2)) / std::sqrt(5.0);
    return Matrix(f * diag3(1.0, 1.0, golden - 1.0));
  });
  c.check(gap <= 1e-8, "phi-hat matches the closed form, gap " + sci(gap));
  const PerronVector pv = perron_vector(phi);
  const double lgap = max_abs(pv.l.matrix() - diag3(golden * golden, golden * golden, golden) / std::sqrt(5.0));
  c.check(lgap <= 1e-8, "L = diag(r^2, r^2, r) / sqrt(5), gap " + sci(lgap));
  const LinearMapOnAlgebra sigma = conjugate_map(phi, herm_sqrt(pv.l.matrix()));
  const double snorm = positive_map_norm(sigma);
  c.check(std::abs(snorm - r) <= 1e-8, "||sigma|| = r, gap " + sci(std::abs(snorm - r)));
}

void criterion2(Criterion &c) {
  const CpMap tau = path_graph_map();
  const auto phi = LinearMapOnAlgebra::from_cp(tau);
  const SpectralStructure ss = spectral_structure(phi);
  std::vector<double> reals;
  double imag = 0.0;
  for (const auto &e : ss.eigenvalues) {
    for (Index k = 0; k < e.multiplicity; ++k) {
      reals.push_back(e.value.real());
    }
    imag = std::max(imag, std::abs(e.value.imag()));
  }
  std::sort(reals.begin(), reals.end());
  const bool eig_ok = reals.size() == 3 && std::abs(reals[0] + root2) <= 1e-10 && std::abs(reals[1]) <= 1e-10 &&
                      std::abs(reals[2] - root2) <= 1e-10 && imag <= 1e-10;
  c.check(eig_ok, "eigenvalues {0, +-sqrt(2)}");

  const MaximalPart mp = maximal_part(phi);
  const auto stated = [](const Matrix &x) {
    const Complex f = 0.5 * (x(0, 0) + root2 * x(1, 1) + x(2, 2));
    return Matrix(f * diag3(1.0, root2, 1.0));
  };
  const double gap = formula_gap(mp, tau.shape(), stated);
  c.check(gap <= 1e-8, "phi-hat matches 1/2 (a + b sqrt2 + c) diag(1, sqrt2, 1), gap " + sci(gap));
  const double quarter = formula_gap(mp, tau.shape(), [&](const Matrix &x) { return Matrix(0.5 * stated(x)); });
  c.note("the same formula with 1/4 in place of 1/2 has gap " + sci(quarter) + "; phi-hat^2 - phi-hat = " +
         sci(mp.idempotent_residual));

  const MaximalFactorization f = maximal_factorization(tau);
  c.check(std::abs(f.r - root2) <= 1e-8 && f.eigen_residual <= 1e-8, "tau(L) = sqrt(2) L, residual " + sci(f.eigen_residual));
  c.check(std::abs(f.trace_rl - 1.0) <= 1e-8, "trace(RL) = 1");
  c.check(f.adjoint_residual <= 1e-8, "adjoint fixes R up to sqrt(2), residual " + sci(f.adjoint_residual));
}

void criterion3(Criterion &c) {
  const CpMap tau = corner_trace_map();
  const auto phi = LinearMapOnAlgebra::from_cp(tau);
  const double r = spectral_radius_map(phi);
  c.check(std::abs(r - 1.0) <= 1e-12, "r = 1");
  SuperOperator pw = phi.superop();
  double worst = 0.0;
  for (int n = 1; n <= 64; ++n) {
    worst = std::max(worst, std::abs(op_norm(pw.apply(Matrix::Identity(2, 2))) - 2.0));
    pw = compose(phi.superop(), pw);
  }
  c.check(worst <= 1e-12, "||tau^n|| = ||tau^n(1)|| = 2 for n = 1..64, worst gap " + sci(worst));
  const MaximalPart mp = maximal_part(phi);
  c.check(mp.d == 1, "d = 1");
  // Range of phi-hat inside the 1-eigenspace.
  const Matrix c1 = phi.coordinates();
  const double range_gap = (c1 * mp.coordinates - mp.coordinates).norm();
  c.check(range_gap <= 1e-10 && mp.idempotent_residual <= 1e-10,
          "phi-hat is the projection onto the r-eigenspace, residual " + sci(range_gap));
}

void criterion4(Criterion &c) {
  const CpMap tau = doubled_trace_map();
  const Irreducibility irr = irreducible_cp(tau);
  c.check(irr.irreducible, "irreducible via the canonical extension");
  c.check(irr.dimension == 4, "generated algebra of the extension has dimension " + std::to_string(irr.dimension));
  std::mt19937_64 rng(4);
  const auto sub = common_invariant_subspace(tau.kraus(), rng);
  bool line = false;
  if (sub && sub->cols() == 1) {
    line = std::abs((*sub)(0, 0)) > 1e-6 && std::abs((*sub)(1, 0) / (*sub)(0, 0) - 1.0) <= 1e-10;
  }
  c.check(line, "the Kraus pair shares the invariant line span{(1, 1)}");
}

void criterion5(Criterion &c) {
  std::mt19937_64 rng(5);
  double worst_low = 0.0, worst_up = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto tuple = random_tuple(2, 2, rng);
    const JsrEstimate brute = jsr_brute(tuple, 10);
    for (int k = 1; k <= 3; ++k) {
      const JsrEstimate tensor = jsr_tensor_approx(tuple, k);
      worst_low = std::max(worst_low, tensor.lower - 1e-9 - brute.upper);
      worst_up = std::max(worst_up, brute.lower - tensor.upper - 1e-9);
    }
  }
  c.check(worst_low <= 0.0 && worst_up <= 0.0, "d^(-1/2k) rho-hat_k^(1/k) <= brute upper and brute lower <= "
                                               "rho-hat_k^(1/k) on 50 tuples, k = 1..3");
  const int singleton_horizon = 4000;
  double tensor_gap = 0.0, lower_gap = 0.0, upper_gap = 0.0, short_gap = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::vector<Matrix> one = {random_matrix(2, rng)};
    const double r = spectral_radius(one[0]);
    for (int k = 1; k <= 3; ++k) {
      const JsrEstimate tensor = jsr_tensor_approx(one, k);
      tensor_gap = std::max({tensor_gap, std::abs(tensor.upper - r), std::abs(tensor.lower - r)});
    }
    // One word per length, so the horizon can be long; ||A^n||^(1/n) - r(A)
    // decays only like 1/n for non-normal A.
    const JsrEstimate brute = jsr_brute(one, singleton_horizon);
    lower_gap = std::max(lower_gap, std::abs(brute.lower - r));
    upper_gap = std::max(upper_gap, std::abs(brute.upper - r));
    short_gap = std::max(short_gap, std::abs(jsr_brute(one, 10).upper - r));
  }
  c.check(tensor_gap <= 1e-3, "singletons: tensor bounds equal r(A), gap " + sci(tensor_gap));
  c.check(lower_gap <= 1e-3 && upper_gap <= 1e-3, "singletons: brute bounds (n_max = " +
                                                      std::to_string(singleton_horizon) + ") equal r(A), gaps " +
                                                      sci(lower_gap) + ", " + sci(upper_gap));
  c.note("singletons: brute upper bound at n_max = 10 has gap up to " + sci(short_gap));
}

const std::vector<AlgebraShape> &random_shapes() {
  static const std::vector<AlgebraShape> shapes = {AlgebraShape({2}), AlgebraShape({2, 1}), AlgebraShape({1, 1, 1})};
  return shapes;
}

void criterion6(Criterion &c) {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const AlgebraShape &shape = random_shapes()[static_cast<std::size_t>(t) % 3];
    const CpMap tau = random_cp_map(shape, 1 + t % 4, rng);
    const Matrix coords = LinearMapOnAlgebra::from_cp(tau).coordinates();
    const double r = spectral_radius(coords);
    double best = std::numeric_limits<double>::infinity();
    for (Complex z : eigenvalues(coords)) {
      best = std::min(best, std::abs(z - r));
    }
    worst = std::max(worst, best);
  }
  c.check(worst < 1e-8, "r is an eigenvalue for 200 random CP maps, worst min |lambda - r| " + sci(worst));
}

void criterion7(Criterion &c) {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  int count = 0;
  for (int t = 0; t < 200; ++t) {
    const AlgebraShape &shape = random_shapes()[static_cast<std::size_t>(t) % 3];
    const CpMap tau = random_cp_map(shape, 1 + t % 4, rng);
    worst = std::max(worst, maximal_part(LinearMapOnAlgebra::from_cp(tau)).route_agreement);
    ++count;
  }
  for (const CpMap &tau :
       {corner_trace_map(), fibonacci_map(), doubled_trace_map(), path_graph_map(), depolarizing_map(2)}) {
    worst = std::max(worst, maximal_part(LinearMapOnAlgebra::from_cp(tau)).route_agreement);
    ++count;
  }
  c.check(worst <= 1e-6, "projection and Cesaro routes agree on " + std::to_string(count) + " maps, worst " + sci(worst));
}

void criterion8(Criterion &c) {
  std::mt19937_64 rng(8);
  int disagreements = 0, rank_mismatch = 0, stab_violations = 0;
  for (int t = 0; t < 100; ++t) {
    const Index m = 2 + t % 2;
    const int count = 1 + t % 3;
    std::vector<Matrix> kraus;
    for (int i = 0; i < count; ++i) {
      kraus.push_back(random_matrix(m, rng));
    }
    const CpMap tau(kraus);
    Matrix a = random_matrix(m, rng);
    if (t % 2 == 0) {
      a.setZero();
      for (const Matrix &k : kraus) {
        a += Complex(std::normal_distribution<double>()(rng), 0.0) * k;
      }
    }
    const Membership mem = membership(a, tau);
    const bool expected = t % 2 == 0;
    bool certified = false;
    if (mem.certificate) {
      certified = dominates(tau.scaled(*mem.certificate), elementary(a));
    } else {
      certified = dominates(tau.scaled(1e6), elementary(a));
    }
    if (mem.member != certified || mem.member != expected) {
      ++disagreements;
    }
    const ResolventMaps g = resolvent_gamma(tau);
    const GeneratedAlgebra alg = algebra_basis(kraus, false);
    if (choi_rank(g.non_unital) != alg.space.dimension()) {
      ++rank_mismatch;
    }
    if (alg.stabilization_index > m * m || algebra_basis(kraus, true).stabilization_index > m * m) {
      ++stab_violations;
    }
  }
  c.check(disagreements == 0, "projection membership agrees with the domination certificate (" +
                                  std::to_string(disagreements) + " disagreements)");
  c.check(rank_mismatch == 0, "Choi rank of gamma_1 equals the non-unital algebra dimension (" +
                                  std::to_string(rank_mismatch) + " mismatches)");
  c.check(stab_violations == 0, "stabilization index <= m^2");
}

void criterion9(Criterion &c) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto tuple = random_tuple(1 + t % 3, 2 + t % 3, rng);
    std::vector<Matrix> adj;
    for (const Matrix &a : tuple) {
      adj.push_back(a.adjoint());
    }
    worst = std::max(worst, std::abs(outer_radius(adj) - outer_radius(tuple)));
  }
  c.check(worst <= 1e-9, "rho-hat(A*) = rho-hat(A) on 50 tuples, worst gap " + sci(worst));
}

void criterion10(Criterion &c) {
  const std::vector<std::pair<const char *, CpMap>> maps = {
      {"golden-ratio map", fibonacci_map()}, {"doubled trace map", doubled_trace_map()}, {"path graph map", path_graph_map()}};
  for (const auto &[name, tau] : maps) {
    const IdealCheck ic = maximal_ideal_check(tau);
    const double worst = std::max({ic.product_residual, ic.left_residual, ic.right_residual, ic.containment_residual});
    c.check(ic.is_subalgebra && ic.is_ideal && worst < 1e-8,
            std::string(name) + ": subalgebra and ideal, worst residual " + sci(worst));
  }
}

} // namespace

int main() {
  struct Entry {
    int number;
    const char *title;
    double budget_seconds;
    void (*run)(Criterion &);
  };
  const std::vector<Entry> entries = {
      {1, "golden-ratio example", 1.0, criterion1},
      {2, "sqrt(2) path graph example", 1.0, criterion2},
      {3, "corner trace example", 1.0, criterion3},
      {4, "irreducible with a common invariant subspace", 1.0, criterion4},
      {5, "joint spectral radius sandwich", 60.0, criterion5},
      {6, "spectral radius is an eigenvalue", 30.0, criterion6},
      {7, "maximal part route agreement", 30.0, criterion7},
      {8, "coefficient space and generated algebras", 60.0, criterion8},
      {9, "outer radius of the adjoint tuple", 60.0, criterion9},
      {10, "maximal part spans an ideal", 60.0, criterion10},
  };
  int failures = 0;
  for (const Entry &e : entries) {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();
    try {
      e.run(c);
    } catch (const std::exception &ex) {
      c.check(false, std::string("exception: ") + ex.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.check(elapsed < e.budget_seconds, "runtime " + sci(elapsed) + " s under " + sci(e.budget_seconds) + " s");
    failures += c.passed() ? 0 : 1;
    std::cout << (c.passed() ? "PASS" : "FAIL") << " criterion " << e.number << ": " << e.title << "\n";
    for (const std::string &line : c.details()) {
      std::cout << line << "\n";
    }
  }
  std::cout << (entries.size() - static_cast<std::size_t>(failures)) << "/" << entries.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
