#pragma once

#include "minqds/gksl_model.hpp"
#include "minqds/resolvent.hpp"

#include <string>
#include <vector>

namespace minqds {

enum class ReferenceKind { minus_two_G, laplacian_plus_one, robin_laplacian, custom };

const char* to_string(ReferenceKind k);

/// Positive self-adjoint reference operator C with its principal square root.
struct ReferenceOperator {
  ComplexMatrix C;
  ComplexMatrix sqrtC;
  ReferenceKind kind = ReferenceKind::custom;
};

/// Validates positivity and caches the square root.
ReferenceOperator make_reference(const ComplexMatrix& C,
                                 ReferenceKind kind = ReferenceKind::custom);

struct PhiOperator {
  ComplexMatrix Phi;
  double defect_gap = 0.0;  // || Phi + G + G^* ||, zero on exact truncations
};

/// F_n = sum_l (n L_l R(n;G))^* (n L_l R(n;G)) = n^2 R(n;G)^* M R(n;G).
ComplexMatrix build_fn(const GKSLModel& model, int n);

struct BEstimate {
  double b = 0.0;
  ComplexVector witness;
};

/// Smallest b with K <= b C on the admissible subspace, where
/// K = sym(C G + G^* C + sum_l L_l^* C L_l).  The pencil is restricted to the
/// range of C (eigenvalues below 1e-12 ||C|| deflated); `constraints` rows,
/// when given, carve out the discrete domain surrogate (e.g. the boundary
/// condition rows of a half-line model) before the eigenproblem is solved.
BEstimate estimate_b(const GKSLModel& model, const ReferenceOperator& ref,
                     const std::vector<ComplexVector>& constraints = {});

struct Margin {
  double max_eig_diff = 0.0;
  bool pass = false;
};

/// pass iff max-eig(A - B) <= tol, for hermitian A, B.
Margin dominance_check(const ComplexMatrix& A, const ComplexMatrix& B, double tol);

/// Phi = sum_l L_l^* L_l with the defect gap || Phi + G + G^* || reported.
/// Refuses models whose truncation creates mass (classification violated);
/// substochastic truncations are accepted with the gap on record.
PhiOperator build_phi(const GKSLModel& model, double condition_a_tol = 1e-8);

/// C_eps = C (I + eps C)^{-1} through the spectral calculus of C.
ComplexMatrix regularize(const ReferenceOperator& ref, double eps);

struct BoundReport {
  struct Entry {
    double eps = 0.0;
    double lhs = 0.0;    // (lambda - b) <u, R(C_eps) u>
    double rhs = 0.0;    // ||C^{1/2} u||^2
    double slack = 0.0;  // rhs - lhs
  };
  std::vector<Entry> entries;
  double min_slack = 0.0;
  bool pass = false;
};

/// Checks (lambda - b) <u, R_lambda(C_eps) u> <= ||C^{1/2}u||^2 + tol for the
/// given vector across the eps sweep, with R via the Neumann series.
BoundReport regularized_bound_check(const GKSLModel& model, const ReferenceOperator& ref,
                           double lambda, double b, const ComplexVector& u,
                           const std::vector<double>& eps_list,
                           const ResolventConfig& rcfg = ResolventConfig{},
                           double tol = 1e-8);

enum class CertStrategy { fn_dominance, phi_dominance, phi_dominance_form, fn_dominance_form };
enum class CertVerdict { certified, refuted_hypothesis, inconclusive };

const char* to_string(CertStrategy s);
const char* to_string(CertVerdict v);
CertStrategy cert_strategy_from_string(const std::string& s);

struct CertCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string note;
};

struct Certificate {
  CertStrategy strategy = CertStrategy::fn_dominance;
  double b_estimate = 0.0;
  double dominance_margin = 0.0;
  std::vector<CertCheck> checks;
  CertVerdict verdict = CertVerdict::inconclusive;
};

struct CertifyOptions {
  // absolute tolerance on the probed form defect for the Condition A check;
  // grid bundles widen this to their measured O(h) scale
  double condition_a_form_tol = 1e-8;
  double condition_a_tol = 1e-8;   // classification tolerance
  ComplexMatrix probes;            // columns; empty means full basis
  std::vector<ComplexVector> b_constraints;
  std::vector<int> fn_sample = {1, 2, 4, 8, 16, 32, 64};
  double dominance_tol_rel = 1e-8;  // scaled by ||C||
  double b_cap = 1e6;               // larger b counts as "no finite b"
};

/// Runs the hypothesis battery of the chosen sufficient criterion and emits a
/// certificate for THIS truncation (never a continuum claim).
Certificate certify(const GKSLModel& model, const ReferenceOperator& ref,
                    CertStrategy strategy, const CertifyOptions& opts = {});

}  // namespace minqds
