#ifndef CPSPECTRA_SPECTRA_HPP
#define CPSPECTRA_SPECTRA_HPP

#include <cstdint>
#include <span>
#include <string>

#include "cpspectra/algebra.hpp"
#include "cpspectra/cpmap.hpp"
#include "cpspectra/mats.hpp"

namespace cpspectra {

enum class JsrMethod { brute, tensor_power };

std::string to_string(JsrMethod method);

/// Two-sided estimate of a joint spectral radius.
struct JsrEstimate {
  double lower = 0.0;
  double upper = 0.0;
  JsrMethod method = JsrMethod::brute;
  int parameter = 0; ///< word length n_max or tensor power k
  std::uint64_t words = 0; ///< products evaluated (brute force only)
};

/// Largest eigenvalue modulus of the superoperator.
double spectral_radius_map(const SuperOperator &op);
double spectral_radius_map(const LinearMapOnAlgebra &phi);

/// sqrt(r(sum_i conj(A_i) kron A_i)).
double outer_radius(std::span<const Matrix> tuple);

/// ||tau^n(1)||^(1/2n) for tau(X) = sum_i A_i^* X A_i, iterated with
/// per-step renormalization.
double outer_radius_gelfand(std::span<const Matrix> tuple, int n);

struct JsrBruteOptions {
  std::uint64_t word_budget = 1'000'000; ///< bound on d^n_max
  unsigned workers = 1;                  ///< partitions by first letter
};

/// Upper bound min_n max_{|w|=n} ||A_w||^(1/n) and lower bound
/// max_w r(A_w)^(1/|w|) over all words of length 1..n_max.
JsrEstimate jsr_brute(std::span<const Matrix> tuple, int n_max, const JsrBruteOptions &options = {});

/// Sandwich d^(-1/2k) rho_hat(A^(k))^(1/k) <= rho <= rho_hat(A^(k))^(1/k)
/// from Kronecker powers A_i^(k). The superoperator side m^(2k) must not
/// exceed `superop_budget`.
JsrEstimate jsr_tensor_approx(std::span<const Matrix> tuple, int k, Index superop_budget = 4096);

/// ||sum_i (v A_i v^-1)^* (v A_i v^-1)||^(1/2) for strictly positive v.
double scaled_outer_radius(std::span<const Matrix> tuple, const Matrix &v, const Tolerance &tol = {});

/// r(w^-1 phi(w)) for strictly positive w in the algebra.
double friedland_value(const LinearMapOnAlgebra &phi, const Matrix &w, const Tolerance &tol = {});

/// ||phi(1)||, the norm of a positive map.
double positive_map_norm(const LinearMapOnAlgebra &phi);

struct NeumannWitness {
  Matrix w;          ///< sum_n (phi/s)^n (1)
  double s = 0.0;
  double spectral_radius = 0.0;
  double residual = 0.0; ///< ||phi(w) - s (w - 1)||
};

/// Solves (id - phi/s) w = 1; requires r(phi) < s.
NeumannWitness neumann_witness(const LinearMapOnAlgebra &phi, double s, const Tolerance &tol = {});

/// x -> v^-1 phi(v x v) v^-1 for strictly positive v in the algebra.
LinearMapOnAlgebra conjugate_map(const LinearMapOnAlgebra &phi, const Matrix &v, const Tolerance &tol = {});

struct NormAchieving {
  Matrix v;                 ///< w^(1/2)
  double norm = 0.0;        ///< ||v^-1 phi(w) v^-1||
  double spectral_radius = 0.0;
  double residual = 0.0;    ///< |norm - r|
  bool achieved = false;    ///< residual <= 1e-8 max(1, r)
};

/// Requires phi(w) <= r(phi) w; throws with the violating eigenvalue otherwise.
NormAchieving norm_achieving_check(const LinearMapOnAlgebra &phi, const Matrix &w, const Tolerance &tol = {});

struct BalanceOptions {
  double epsilon = 1.0;        ///< upper bound on the block scaling parameter
  double power_bound = 1e3;    ///< admissible sup ||A^n / r^n||
  int horizon = 256;           ///< powers probed
  double cluster_tol = 1e-8;   ///< relative eigenvalue clustering
};

struct BalancedSimilarity {
  Matrix p;          ///< the similarity P
  Matrix p_inverse;
  double norm = 0.0; ///< ||P A P^-1||
  double spectral_radius = 0.0;
  double max_normalized_power = 0.0;
};

/// Invertible P with ||P A P^-1|| = r(A) (up to 1e-6 relative) for a matrix
/// whose normalized powers are bounded.
BalancedSimilarity balance_similarity(const Matrix &a, const BalanceOptions &options = {},
                                      const Tolerance &tol = {});

/// Nonzero singular PSD element of span{W1, W2} for PSD, independent W1, W2.
Matrix singular_psd_combination(const Matrix &w1, const Matrix &w2, const Tolerance &tol = {});

} // namespace cpspectra

#endif
