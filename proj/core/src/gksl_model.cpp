#include "minqds/gksl_model.hpp"

#include <stdexcept>

namespace minqds {

void GKSLModel::validate() const {
  if (G.rows() != G.cols() || G.rows() < 1) {
    throw std::invalid_argument("GKSLModel: G must be square with dim >= 1");
  }
  const Eigen::Index n = G.rows();
  for (const auto& L : Ls) {
    if (L.rows() != n || L.cols() != n) {
      throw std::invalid_argument("GKSLModel: channel dimension mismatch");
    }
  }
  if (H.has_value() != M.has_value()) {
    throw std::invalid_argument("GKSLModel: H and M must be supplied together");
  }
  if (H) {
    if (H->rows() != n || H->cols() != n || M->rows() != n || M->cols() != n) {
      throw std::invalid_argument("GKSLModel: H/M dimension mismatch");
    }
    if (!is_hermitian(*H)) {
      throw std::invalid_argument("GKSLModel: H must be hermitian");
    }
    if (!is_positive_semidefinite(*M, 1e-10)) {
      throw std::invalid_argument("GKSLModel: M must be positive semidefinite");
    }
    const Complex i(0.0, 1.0);
    const double res = (G + i * (*H) + 0.5 * (*M)).norm();
    const double scale = H->norm() + M->norm() + 1.0;
    if (res > 1e-10 * scale) {
      throw std::invalid_argument("GKSLModel: G != -iH - M/2 within tolerance");
    }
  }
}

ComplexMatrix dissipation_defect(const GKSLModel& model) {
  model.validate();
  ComplexMatrix D = model.G + model.G.adjoint();
  for (const auto& L : model.Ls) D.noalias() += L.adjoint() * L;
  return hermitian_part(D);
}

const char* to_string(ConditionAClass c) {
  switch (c) {
    case ConditionAClass::exact: return "exact";
    case ConditionAClass::substochastic: return "substochastic";
    case ConditionAClass::violated: return "violated";
  }
  return "?";
}

ConditionAReport check_condition_a(const GKSLModel& model, double tol) {
  const ComplexMatrix D = dissipation_defect(model);
  ConditionAReport rep;
  rep.defect_norm = operator_norm(D);
  rep.max_defect_eig = rep.defect_norm == 0.0 ? 0.0 : max_eigenvalue(D);
  if (rep.defect_norm <= tol) {
    rep.classification = ConditionAClass::exact;
  } else if (rep.max_defect_eig <= tol) {
    rep.classification = ConditionAClass::substochastic;
  } else {
    rep.classification = ConditionAClass::violated;
  }
  return rep;
}

ComplexMatrix apply_generator(const GKSLModel& model, const ComplexMatrix& X) {
  model.validate();
  if (X.rows() != model.dim() || X.cols() != model.dim()) {
    throw std::invalid_argument("apply_generator: X dimension mismatch");
  }
  const bool herm = is_hermitian(X);
  ComplexMatrix out = model.G.adjoint() * X + X * model.G;
  for (const auto& L : model.Ls) out.noalias() += L.adjoint() * X * L;
  return herm ? hermitian_part(out) : out;
}

ComplexMatrix semigroup_action(const GKSLModel& model, double t) {
  model.validate();
  if (t < 0.0) {
    throw std::invalid_argument("semigroup_action: t must be nonnegative");
  }
  if (t == 0.0) {
    return ComplexMatrix::Identity(model.dim(), model.dim());
  }
  return matrix_exp(t * model.G);
}

}  // namespace minqds
