#pragma once

#include "minqds/complex_matrix.hpp"

#include <stdexcept>

namespace minqds {

class SylvesterError : public std::runtime_error {
 public:
  SylvesterError(const std::string& msg, double condition_estimate)
      : std::runtime_error(msg), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Solves A Y + Y B = Q by Bartels-Stewart (complex Schur reduction of both
/// coefficients, then a triangular column sweep).  Requires the spectra of A
/// and -B to be separated; a near-singular pencil raises SylvesterError with
/// the separation estimate.
ComplexMatrix solve_sylvester(const ComplexMatrix& A, const ComplexMatrix& B,
                              const ComplexMatrix& Q);

/// Reusable solver for the shifted family (lambda I - G^*) Y - Y G = X with a
/// fixed G.  The Schur factorization of G is computed once; every solve is a
/// pair of basis changes plus one triangular sweep.
class ShiftedLyapunovSolver {
 public:
  explicit ShiftedLyapunovSolver(const ComplexMatrix& G);

  Eigen::Index dim() const { return T_.rows(); }

  /// Y with (lambda I - G^*) Y - Y G = X.  Needs lambda > 2 max Re(spec G),
  /// which holds for any lambda > 0 when G generates a contraction semigroup.
  ComplexMatrix solve(double lambda, const ComplexMatrix& X) const;

 private:
  ComplexMatrix U_;  // unitary Schur basis of G
  ComplexMatrix T_;  // upper triangular Schur factor of G
};

}  // namespace minqds
