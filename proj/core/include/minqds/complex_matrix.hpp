#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace minqds {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Operator (spectral) norm. Exact for hermitian input, reasonably tight in
/// general; uses an SVD so it is safe for small dense matrices only.
double operator_norm(const ComplexMatrix& a);

/// Frobenius norm shortcut used in residual checks.
inline double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);

/// (a + a*)/2, used to suppress roundoff drift on hermitian pipelines.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Eigenvalue extremes of the hermitian part of `a`. Throws if `a` is not
/// hermitian within `rel_tol` of its norm.
double min_eigenvalue(const ComplexMatrix& a, double rel_tol = 1e-10);
double max_eigenvalue(const ComplexMatrix& a, double rel_tol = 1e-10);

/// True if `a` is hermitian and its spectrum is >= -rel_tol * ||a||.
bool is_positive_semidefinite(const ComplexMatrix& a, double rel_tol = 1e-12);

/// Principal square root of a positive semidefinite hermitian matrix.
/// Small negative eigenvalues (>= -rel_tol * ||a||) are clipped to zero;
/// anything below throws.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& a, double rel_tol = 1e-10);

/// e^{tA} via scaling-and-squaring with a Pade-type rational approximation.
ComplexMatrix matrix_exp(const ComplexMatrix& a);

/// Matrix interchange format, version 1.  Plain text:
///
///   minqds-matrix v1
///   dim <n>
///   <re> <im> <re> <im> ...        (n lines, row-major, 17 significant digits)
///
/// Round-trips bit-exactly for finite doubles.
void save_matrix(std::ostream& os, const ComplexMatrix& a);
void save_matrix_file(const std::string& path, const ComplexMatrix& a);
ComplexMatrix load_matrix(std::istream& is);
ComplexMatrix load_matrix_file(const std::string& path);

/// Locale-independent shortest-exact formatting (17 significant digits).
std::string format_double(double v);

}  // namespace minqds
