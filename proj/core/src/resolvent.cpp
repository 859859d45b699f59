#include "minqds/resolvent.hpp"

#include <stdexcept>

namespace minqds {

void ResolventConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("ResolventConfig: lambda must be > 0");
  if (max_terms < 1) throw std::invalid_argument("ResolventConfig: max_terms must be >= 1");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("ResolventConfig: tail_tol must be > 0");
}

ResolventEngine::ResolventEngine(const GKSLModel& model)
    : model_(model), solver_(model.G) {
  model_.validate();
}

ComplexMatrix ResolventEngine::p_lambda(double lambda, const ComplexMatrix& X) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("p_lambda: lambda must be > 0");
  if (X.rows() != dim() || X.cols() != dim()) {
    throw std::invalid_argument("p_lambda: X dimension mismatch");
  }
  const bool herm = is_hermitian(X);
  ComplexMatrix Y = solver_.solve(lambda, X);
  return herm ? hermitian_part(Y) : Y;
}

ComplexMatrix ResolventEngine::q_lambda(double lambda, const ComplexMatrix& X) const {
  if (X.rows() != dim() || X.cols() != dim()) {
    throw std::invalid_argument("q_lambda: X dimension mismatch");
  }
  ComplexMatrix S = ComplexMatrix::Zero(dim(), dim());
  for (const auto& L : model_.Ls) S.noalias() += L.adjoint() * X * L;
  return p_lambda(lambda, S);
}

ComplexMatrix p_lambda(const GKSLModel& model, double lambda, const ComplexMatrix& X) {
  return ResolventEngine(model).p_lambda(lambda, X);
}

ComplexMatrix q_lambda(const GKSLModel& model, double lambda, const ComplexMatrix& X) {
  return ResolventEngine(model).q_lambda(lambda, X);
}

NeumannResult neumann_resolvent(const ResolventEngine& eng, const ResolventConfig& cfg,
                                const ComplexMatrix& X) {
  cfg.validate();
  NeumannResult out;
  ComplexMatrix term = eng.p_lambda(cfg.lambda, X);
  out.R = ComplexMatrix::Zero(eng.dim(), eng.dim());
  for (int k = 0; k < cfg.max_terms; ++k) {
    out.R += term;
    out.terms_used = k + 1;
    term = eng.q_lambda(cfg.lambda, term);
    out.tail_norm = operator_norm(term);
    if (out.tail_norm <= cfg.tail_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

NeumannResult neumann_resolvent(const GKSLModel& model, const ResolventConfig& cfg,
                                const ComplexMatrix& X) {
  return neumann_resolvent(ResolventEngine(model), cfg, X);
}

double identity_residual(const GKSLModel& model, double lambda, int n,
                         double condition_a_tol) {
  if (n < 0) throw std::invalid_argument("identity_residual: n must be >= 0");
  const auto rep = check_condition_a(model, condition_a_tol);
  if (rep.classification != ConditionAClass::exact) {
    throw std::invalid_argument(
        "identity_residual: model classification is '" +
        std::string(to_string(rep.classification)) +
        "', but the resolvent identity assumes the exact form identity; "
        "use defect_iteration to obtain the signed residual instead");
  }
  ResolventEngine eng(model);
  const Eigen::Index d = model.dim();
  const ComplexMatrix I = ComplexMatrix::Identity(d, d);
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  ComplexMatrix p_term = eng.p_lambda(lambda, I);  // Q^k(P(I))
  ComplexMatrix q_term = I;                        // Q^k(I)
  for (int k = 0; k <= n; ++k) {
    sum += p_term;
    p_term = eng.q_lambda(lambda, p_term);
    q_term = eng.q_lambda(lambda, q_term);
  }
  return operator_norm(sum + q_term / lambda - I / lambda);
}

const char* to_string(DefectVerdict v) {
  switch (v) {
    case DefectVerdict::conservative_at_tol: return "conservative_at_tol";
    case DefectVerdict::defect_detected: return "defect_detected";
    case DefectVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

DefectSequence defect_iteration(const ResolventEngine& eng, const ResolventConfig& cfg,
                                const ComplexMatrix& probes) {
  cfg.validate();
  const Eigen::Index d = eng.dim();
  const ComplexMatrix I = ComplexMatrix::Identity(d, d);
  const double lambda = cfg.lambda;

  DefectSequence seq;
  seq.lambda = lambda;

  ComplexMatrix q_term = I;                              // Q^n(I)
  ComplexMatrix p_term = eng.p_lambda(lambda, I);        // Q^n(P(I))
  ComplexMatrix partial = ComplexMatrix::Zero(d, d);     // sum_{k<=n} Q^k(P(I))

  bool decayed = false;
  bool stagnated = false;
  seq.term_norms.push_back(operator_norm(q_term));
  for (int n = 0; n < cfg.max_terms; ++n) {
    partial += p_term;
    ComplexMatrix q_next = eng.q_lambda(lambda, q_term);
    const double norm_next = operator_norm(q_next);
    const double step = operator_norm(q_term - q_next);
    seq.monotonicity_min_eigs.push_back(min_eigenvalue(hermitian_part(q_term - q_next)));
    seq.identity_residuals.push_back(
        operator_norm(partial + q_next / lambda - I / lambda));
    q_term.swap(q_next);
    seq.term_norms.push_back(norm_next);
    seq.terms_used = n + 1;
    if (norm_next < cfg.tail_tol) {
      decayed = true;
      break;
    }
    if (step < cfg.tail_tol * cfg.stagnation_step_factor &&
        norm_next >= cfg.tail_tol * cfg.stagnation_norm_factor) {
      stagnated = true;
      break;
    }
    p_term = eng.q_lambda(lambda, p_term);
  }

  seq.q_limit = q_term;
  seq.defect_estimate = hermitian_part(I - lambda * partial - q_term);
  seq.consistency_residual = operator_norm(partial + q_term / lambda - I / lambda);

  if (probes.size() == 0) {
    seq.probe_defect = max_eigenvalue(seq.defect_estimate);
  } else {
    if (probes.rows() != d) {
      throw std::invalid_argument("defect_iteration: probe dimension mismatch");
    }
    double worst = 0.0;
    for (Eigen::Index j = 0; j < probes.cols(); ++j) {
      const ComplexVector u = probes.col(j);
      const double den = u.squaredNorm();
      if (den == 0.0) continue;
      const double val = (u.adjoint() * seq.defect_estimate * u).value().real() / den;
      worst = std::max(worst, val);
    }
    seq.probe_defect = worst;
  }

  if (decayed) {
    seq.verdict = seq.probe_defect < cfg.defect_tol
                      ? DefectVerdict::conservative_at_tol
                      : DefectVerdict::defect_detected;
  } else if (stagnated) {
    seq.verdict = DefectVerdict::defect_detected;
  } else {
    seq.verdict = DefectVerdict::inconclusive;
  }
  return seq;
}

DefectSequence defect_iteration(const GKSLModel& model, const ResolventConfig& cfg,
                                const ComplexMatrix& probes) {
  return defect_iteration(ResolventEngine(model), cfg, probes);
}

}  // namespace minqds
