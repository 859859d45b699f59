#pragma once

#include "minqds/complex_matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace minqds {

enum class BoundaryKind { none, robin, upwind };

/// Discretization record for the half-line models; plain metadata.
struct GridMeta {
  double spacing = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  BoundaryKind boundary = BoundaryKind::none;
  double theta = 0.0;  // Robin parameter u'(0) = theta u(0), when applicable
  std::string notes;
};

/// Truncated operator family (G, L_l) of a GKSL generator.  All operators act
/// on the same finite-dimensional space with the standard inner product; grid
/// models are stored in symmetrized (weight-absorbed) coordinates.
struct GKSLModel {
  ComplexMatrix G;
  std::vector<ComplexMatrix> Ls;
  std::optional<ComplexMatrix> H;  // hermitian part, when G = -iH - M/2 split is known
  std::optional<ComplexMatrix> M;  // positive part of the split
  std::optional<GridMeta> grid;
  std::string label;

  Eigen::Index dim() const { return G.rows(); }

  /// Structural checks: square G, matching dims, H/M split consistency.
  /// Throws std::invalid_argument on violation.
  void validate() const;
};

/// D = G + G^* + sum_l L_l^* L_l.  Zero means the truncation satisfies the
/// form identity of Condition A exactly; negative semidefinite means the
/// truncation is substochastic (loses mass).
ComplexMatrix dissipation_defect(const GKSLModel& model);

enum class ConditionAClass { exact, substochastic, violated };

const char* to_string(ConditionAClass c);

struct ConditionAReport {
  double defect_norm = 0.0;
  double max_defect_eig = 0.0;
  ConditionAClass classification = ConditionAClass::violated;
};

ConditionAReport check_condition_a(const GKSLModel& model, double tol = 1e-8);

/// L(X) = G^* X + X G + sum_l L_l^* X L_l.  Hermitian input is resymmetrized
/// on output to keep downstream eigenvalue tests exact.
ComplexMatrix apply_generator(const GKSLModel& model, const ComplexMatrix& X);

/// P(t) = e^{tG}, t >= 0.
ComplexMatrix semigroup_action(const GKSLModel& model, double t);

}  // namespace minqds
