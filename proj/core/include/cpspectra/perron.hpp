#ifndef CPSPECTRA_PERRON_HPP
#define CPSPECTRA_PERRON_HPP

// Peripheral spectral data of maps on finite-dimensional C*-algebras: Jordan
// degeneracy indices, the maximal part, Perron eigenvectors, irreducibility
// and algebras generated by matrix tuples.

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cpspectra/algebra.hpp"
#include "cpspectra/cpmap.hpp"
#include "cpspectra/mats.hpp"

namespace cpspectra {

struct EigenvalueInfo {
  Complex value;
  Index multiplicity = 0;
  Index degeneracy_index = 0; ///< size of the largest Jordan block
};

struct SpectralStructure {
  std::vector<EigenvalueInfo> eigenvalues; ///< by decreasing modulus
  double r = 0.0;
  Index d_max = 0; ///< largest degeneracy index on the peripheral spectrum
  std::vector<Complex> maximal_spectrum;
};

struct SpectralOptions {
  double cluster_tol = 1e-8; ///< eigenvalues closer than cluster_tol * r are merged
  double plateau_tol = 1e-6; ///< relative singular-value floor for rank((T - lambda)^k)
};

SpectralStructure spectral_structure(const Matrix &t, const SpectralOptions &options = {});
SpectralStructure spectral_structure(const SuperOperator &op, const SpectralOptions &options = {});
/// Works in algebra coordinates, so off-block directions do not add zeros.
SpectralStructure spectral_structure(const LinearMapOnAlgebra &phi, const SpectralOptions &options = {});

struct MaximalPartOptions {
  SpectralOptions spectral;
  int max_doublings = 16;            ///< Cesaro budget when d = 1
  std::uint64_t max_terms = 1 << 14; ///< Cesaro budget when d > 1
  bool cross_check = true;
};

struct MaximalPart {
  Matrix coordinates;    ///< phi-hat in algebra coordinates
  SuperOperator superop; ///< phi-hat on M_m (zero off the algebra); empty for a raw matrix of non-square side
  double r = 0.0;
  Index d = 0;
  bool idempotent = false;
  double idempotent_residual = 0.0; ///< ||phi-hat^2 - phi-hat||
  double square_residual = 0.0;     ///< ||phi-hat^2||
  double commutation_residual = 0.0; ///< max ||T phi-hat - r phi-hat||, ||phi-hat T - r phi-hat||
  // Cesaro cross-check; route_agreement is ||cesaro - projection||.
  bool cesaro_converged = false;
  std::uint64_t cesaro_terms = 0;
  double route_agreement = 0.0;
};

/// phi-hat = (T - r)^(d-1) P_r from the Riesz projector, cross-checked
/// against the normalized Cesaro mean. Throws PreconditionError if r = 0 and
/// ConvergenceError if the d = 1 Cesaro mean does not settle in budget.
MaximalPart maximal_part(const Matrix &t, const Tolerance &tol = {}, const MaximalPartOptions &options = {});
MaximalPart maximal_part(const LinearMapOnAlgebra &phi, const Tolerance &tol = {},
                         const MaximalPartOptions &options = {});

struct PerronVector {
  AlgebraElement l;
  double r = 0.0;
  double residual = 0.0; ///< ||phi(L) - r L|| / ||L||
  PsdReport positivity;
};

/// L = phi-hat(1).
PerronVector perron_vector(const LinearMapOnAlgebra &phi, const Tolerance &tol = {},
                           const MaximalPartOptions &options = {});

struct MaximalFactorization {
  Matrix density;   ///< R with psi(X) = trace(R X)
  AlgebraElement l; ///< tau(L) = r L
  double r = 0.0;
  double eigen_residual = 0.0;   ///< ||tau(L) - r L||
  double trace_rl = 0.0;         ///< trace(R L) after rescaling
  double adjoint_residual = 0.0; ///< ||E(sum A_i R A_i^*) - r R||
  double rank_one_residual = 0.0; ///< ||phi-hat - vec(L) psi||
  double hermiticity_defect = 0.0; ///< of R, reported, not repaired
  bool faithful = false;           ///< R strictly positive
  double min_eigenvalue = 0.0;     ///< of R
};

/// phi-hat(X) = trace(R X) L for an irreducible CP map. Throws
/// PreconditionError for reducible maps or if phi-hat is not rank one.
MaximalFactorization maximal_factorization(const CpMap &tau, const Tolerance &tol = {},
                                           const MaximalPartOptions &options = {});

/// Orthonormal basis of an algebra generated by a tuple.
struct GeneratedAlgebra {
  CoefficientSpace space;
  /// Last product length that enlarged the span (0 when only I is present).
  Index stabilization_index = 0;
};

/// Unital: span of all products including the empty one. Non-unital: span
/// of products of length >= 1.
GeneratedAlgebra algebra_basis(std::span<const Matrix> tuple, bool unital, const Tolerance &tol = {});

struct Irreducibility {
  bool irreducible = false;
  Index dimension = 0; ///< of the algebra generated by the Kraus list of the extension
  Index target = 0;    ///< m^2
  std::optional<Matrix> witness; ///< unit HS-norm matrix orthogonal to that algebra
};

Irreducibility irreducible_cp(const CpMap &tau, const Tolerance &tol = {});

struct PositivityProbe {
  bool strictly_positive = false;
  int probes = 0;
  double min_ratio = 0.0; ///< smallest min/max eigenvalue ratio seen
};

/// Checks that (1 + tau~)^(m-1) sends rank-one PSD inputs to strictly
/// positive matrices: the m basis projections, then `probes` random vectors
/// supported in one block each. Corroborates irreducible_cp, never decides it.
PositivityProbe strict_positivity_probe(const CpMap &tau, std::mt19937_64 &rng, int probes = 64,
                                        const Tolerance &tol = {});

struct ResolventMaps {
  SuperOperator unital;     ///< gamma_0 or eta_0
  SuperOperator non_unital; ///< gamma_1 = gamma_0 - id or eta_1 = eta_0 - id
  double parameter = 0.0;
};

/// (id - b T)^-1 for the superoperator T of tau on M_m; b defaults to
/// 1 / (2 max(1, r)). Requires b > 0 and b r < 1.
ResolventMaps resolvent_gamma(const CpMap &tau, std::optional<double> b = std::nullopt,
                              const Tolerance &tol = {});
/// exp(d T), d > 0.
ResolventMaps exp_eta(const CpMap &tau, double d = 1.0);

struct IdealCheck {
  bool is_subalgebra = false;
  bool is_ideal = false;
  Index dimension = 0;                ///< of span{B_j}
  double product_residual = 0.0;      ///< B_i B_j outside the span
  double left_residual = 0.0;         ///< A_i B_j outside the span
  double right_residual = 0.0;        ///< B_j A_i outside the span
  double containment_residual = 0.0;  ///< B_j outside the algebra of the A_i
};

/// Closure tests for the coefficient span of the maximal part of the
/// canonical extension, against the Kraus list of that extension.
IdealCheck maximal_ideal_check(const CpMap &tau, const Tolerance &tol = {}, double threshold = 1e-8,
                               const MaximalPartOptions &options = {});

/// Orthonormal basis (columns) of a proper nonzero subspace invariant under
/// every matrix of the tuple, if the sampled algebra elements reveal one.
std::optional<Matrix> common_invariant_subspace(std::span<const Matrix> tuple, std::mt19937_64 &rng,
                                                const Tolerance &tol = {}, int samples = 4);

} // namespace cpspectra

#endif
