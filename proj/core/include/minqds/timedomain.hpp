#pragma once

#include "minqds/gksl_model.hpp"
#include "minqds/resolvent.hpp"

#include <vector>

namespace minqds {

enum class QuadRule { trapezoid, simpson };

struct EvolutionConfig {
  double t_final = 1.0;
  double dt = 0.0;  // 0 => t_final / 200
  QuadRule quad_rule = QuadRule::trapezoid;
  int picard_depth = 30;

  void validate() const;
  double effective_dt() const;
};

/// Heisenberg-picture propagator for T_t(X), dX/dt = G^*X + XG + sum L^*XL.
/// Small dimensions go through the vectorized superoperator exponential
/// (exact up to expm accuracy); larger ones through an adaptive
/// Dormand-Prince 5(4) integrator on the matrix equation.
class Evolver {
 public:
  explicit Evolver(const GKSLModel& model, double rtol = 1e-10, double atol = 1e-13);

  const GKSLModel& model() const { return model_; }

  ComplexMatrix at(const ComplexMatrix& X, double t) const;

  /// Values of T_t(X) on a uniformly spaced increasing time grid starting at
  /// ts[0] = 0.  One stepping pass; much cheaper than repeated at().
  std::vector<ComplexMatrix> path(const ComplexMatrix& X,
                                  const std::vector<double>& ts) const;

 private:
  friend ComplexMatrix heisenberg_superoperator(const GKSLModel&);
  ComplexMatrix rhs(const ComplexMatrix& X) const;
  ComplexMatrix integrate(ComplexMatrix X, double t0, double t1) const;

  GKSLModel model_;
  double rtol_, atol_;
  ComplexMatrix superop_;  // cached when dim is small enough
};

/// dim^2 x dim^2 matrix S with vec(L(X)) = S vec(X) (column-major vec).
ComplexMatrix heisenberg_superoperator(const GKSLModel& model);

/// T_t(X) single shot.
ComplexMatrix evolve(const GKSLModel& model, const ComplexMatrix& X, double t);

/// Picard iterates T_t^{(0..n)}(X) of the integral evolution equation at
/// t = cfg.t_final, for positive semidefinite X.  The sequence increases to
/// the minimal-semigroup value as n grows.
std::vector<ComplexMatrix> picard_iterates(const GKSLModel& model,
                                           const ComplexMatrix& X,
                                           const EvolutionConfig& cfg);

/// || T_{t+s}(X) - T_t(T_s(X)) ||.
double semigroup_property_check(const GKSLModel& model, const ComplexMatrix& X,
                                double s, double t);

struct CrossCheck {
  ComplexMatrix quad_value;       // time-domain Laplace quadrature
  ComplexMatrix resolvent_value;  // Neumann-series resolvent
  double discrepancy = 0.0;
  double tail_bound = 0.0;  // e^{-lambda t_final} ||X|| / lambda
};

/// Laplace transform of the evolution versus the Neumann resolvent; the two
/// engines are mutual oracles.
CrossCheck laplace_crosscheck(const GKSLModel& model, double lambda,
                              const ComplexMatrix& X, const EvolutionConfig& cfg,
                              const ResolventConfig& rcfg = ResolventConfig{});

}  // namespace minqds
