#pragma once

#include "minqds/gksl_model.hpp"
#include "minqds/sylvester.hpp"

#include <memory>
#include <vector>

namespace minqds {

struct ResolventConfig {
  double lambda = 1.0;
  int max_terms = 200;
  double tail_tol = 1e-6;
  // stagnation heuristics for the defect iteration; artifact knobs
  double stagnation_step_factor = 1e-2;  // ||delta|| < tail_tol * this
  double stagnation_norm_factor = 10.0;  // while ||Q^n(I)|| >= tail_tol * this
  // threshold on the probed mass defect that separates "conservative at this
  // truncation" from a detected defect
  double defect_tol = 0.1;

  void validate() const;
};

/// Caches the Schur factorization of G so the maps P_lambda and Q_lambda are
/// single triangular sweeps.  Safe for concurrent use after construction.
class ResolventEngine {
 public:
  explicit ResolventEngine(const GKSLModel& model);

  const GKSLModel& model() const { return model_; }
  Eigen::Index dim() const { return model_.dim(); }

  /// P_lambda(X) = int_0^inf e^{-lambda s} P(s)^* X P(s) ds, computed as the
  /// solution of (lambda I - G^*) Y - Y G = X.
  ComplexMatrix p_lambda(double lambda, const ComplexMatrix& X) const;

  /// Q_lambda(X) = P_lambda(sum_l L_l^* X L_l).
  ComplexMatrix q_lambda(double lambda, const ComplexMatrix& X) const;

 private:
  GKSLModel model_;
  ShiftedLyapunovSolver solver_;
};

ComplexMatrix p_lambda(const GKSLModel& model, double lambda, const ComplexMatrix& X);
ComplexMatrix q_lambda(const GKSLModel& model, double lambda, const ComplexMatrix& X);

struct NeumannResult {
  ComplexMatrix R;
  int terms_used = 0;
  double tail_norm = 0.0;  // norm of the first omitted term
  bool converged = false;
};

/// Resolvent of the minimal semigroup: R = sum_k Q_lambda^k(P_lambda(X)).
/// Stops when the term norm drops below cfg.tail_tol or max_terms is hit;
/// non-convergence is reported through the flags, not an exception.
NeumannResult neumann_resolvent(const ResolventEngine& eng, const ResolventConfig& cfg,
                                const ComplexMatrix& X);
NeumannResult neumann_resolvent(const GKSLModel& model, const ResolventConfig& cfg,
                                const ComplexMatrix& X);

/// || sum_{k<=n} Q^k(P(I)) + Q^{n+1}(I)/lambda - I/lambda ||.  Only defined
/// for exact-classification models; refuses otherwise, since the identity
/// provably fails on substochastic truncations (the signed residual is then
/// reported by defect_iteration).
double identity_residual(const GKSLModel& model, double lambda, int n,
                         double condition_a_tol = 1e-8);

enum class DefectVerdict { conservative_at_tol, defect_detected, inconclusive };

const char* to_string(DefectVerdict v);

struct DefectSequence {
  double lambda = 0.0;
  // per-iteration records for Q^n(I), n = 0,1,...
  std::vector<double> term_norms;
  std::vector<double> monotonicity_min_eigs;  // min eig of term_n - term_{n+1}
  std::vector<double> identity_residuals;     // signed residual of the n-term identity
  int terms_used = 0;
  ComplexMatrix q_limit;          // last computed Q^n(I)
  ComplexMatrix defect_estimate;  // I - lambda R(I) - q_limit (probed mass loss)
  double probe_defect = 0.0;      // max_u <u, defect u>/<u,u> over probes
  double consistency_residual = 0.0;  // ||R(I) + q_limit/lambda - I/lambda||
  DefectVerdict verdict = DefectVerdict::inconclusive;
};

/// Iterates the non-increasing chain Q_lambda^n(I) and decides the
/// conservativity verdict for this truncation.  `probes`' columns, when
/// present, select the states against which the mass defect is measured
/// (defaults to the full basis / operator norm).
DefectSequence defect_iteration(const ResolventEngine& eng, const ResolventConfig& cfg,
                                const ComplexMatrix& probes = ComplexMatrix());
DefectSequence defect_iteration(const GKSLModel& model, const ResolventConfig& cfg,
                                const ComplexMatrix& probes = ComplexMatrix());

}  // namespace minqds
