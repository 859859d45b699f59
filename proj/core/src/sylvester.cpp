#include "minqds/sylvester.hpp"

#include <Eigen/Eigenvalues>

#include <limits>

namespace minqds {

ComplexMatrix solve_sylvester(const ComplexMatrix& A, const ComplexMatrix& B,
                              const ComplexMatrix& Q) {
  if (A.rows() != A.cols() || B.rows() != B.cols()) {
    throw std::invalid_argument("solve_sylvester: A and B must be square");
  }
  if (Q.rows() != A.rows() || Q.cols() != B.rows()) {
    throw std::invalid_argument("solve_sylvester: Q has incompatible shape");
  }
  const Eigen::Index m = A.rows(), n = B.rows();

  Eigen::ComplexSchur<ComplexMatrix> sa(A), sb(B);
  if (sa.info() != Eigen::Success || sb.info() != Eigen::Success) {
    throw SylvesterError("solve_sylvester: Schur decomposition failed", 0.0);
  }
  const ComplexMatrix& Ta = sa.matrixT();
  const ComplexMatrix& Tb = sb.matrixT();
  const ComplexMatrix& Ua = sa.matrixU();
  const ComplexMatrix& Ub = sb.matrixU();

  // pencil separation estimate from the diagonal sums
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      sep = std::min(sep, std::abs(Ta(i, i) + Tb(k, k)));
    }
  }
  const double scale = Ta.norm() + Tb.norm() + 1.0;
  if (!(sep > 1e-13 * scale)) {
    throw SylvesterError("solve_sylvester: near-singular pencil, separation " +
                             format_double(sep),
                         sep);
  }

  ComplexMatrix Y = Ua.adjoint() * Q * Ub;  // becomes the transformed solution
  // Ta ytil + ytil Tb = qtil, column sweep (Ta upper triangular)
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) {
      Y.col(k).noalias() -= Y.leftCols(k) * Tb.col(k).head(k);
    }
    // (Ta + Tb(k,k) I) y_k = rhs, back substitution
    const Complex shift = Tb(k, k);
    for (Eigen::Index i = m - 1; i >= 0; --i) {
      Complex s = Y(i, k);
      for (Eigen::Index j = i + 1; j < m; ++j) s -= Ta(i, j) * Y(j, k);
      Y(i, k) = s / (Ta(i, i) + shift);
    }
  }
  return Ua * Y * Ub.adjoint();
}

ShiftedLyapunovSolver::ShiftedLyapunovSolver(const ComplexMatrix& G) {
  if (G.rows() != G.cols()) {
    throw std::invalid_argument("ShiftedLyapunovSolver: G must be square");
  }
  Eigen::ComplexSchur<ComplexMatrix> s(G);
  if (s.info() != Eigen::Success) {
    throw SylvesterError("ShiftedLyapunovSolver: Schur decomposition failed", 0.0);
  }
  U_ = s.matrixU();
  T_ = s.matrixT();
}

ComplexMatrix ShiftedLyapunovSolver::solve(double lambda,
                                           const ComplexMatrix& X) const {
  const Eigen::Index n = dim();
  if (X.rows() != n || X.cols() != n) {
    throw std::invalid_argument("ShiftedLyapunovSolver: X has wrong dimension");
  }
  // (lambda - G^*) Y - Y G = X with G = U T U^*:
  // (lambda - T^*) ytil - ytil T = xtil, T^* lower triangular.
  ComplexMatrix Y = U_.adjoint() * X * U_;
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) {
      Y.col(k).noalias() += Y.leftCols(k) * T_.col(k).head(k);
    }
    // ((lambda - T(k,k)) I - T^*) y_k = rhs, forward substitution
    const Complex shift = lambda - T_(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex s = Y(i, k);
      for (Eigen::Index j = 0; j < i; ++j) s += std::conj(T_(j, i)) * Y(j, k);
      const Complex d = shift - std::conj(T_(i, i));
      sep = std::min(sep, std::abs(d));
      Y(i, k) = s / d;
    }
  }
  if (!(sep > 1e-13 * (std::abs(lambda) + T_.norm() + 1.0))) {
    throw SylvesterError("ShiftedLyapunovSolver: near-singular shift lambda=" +
                             format_double(lambda),
                         sep);
  }
  return U_ * Y * U_.adjoint();
}

}  // namespace minqds
