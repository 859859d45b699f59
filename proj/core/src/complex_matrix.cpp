#include "minqds/complex_matrix.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace minqds {

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == a.cols() && is_hermitian(a)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a),
                                                    Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.norm();
  return (a - a.adjoint()).norm() <= rel_tol * (scale + 1.0);
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

namespace {

Eigen::VectorXd hermitian_spectrum(const ComplexMatrix& a, double rel_tol) {
  if (!is_hermitian(a, rel_tol)) {
    throw std::invalid_argument("hermitian spectrum requested for a non-hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

double min_eigenvalue(const ComplexMatrix& a, double rel_tol) {
  return hermitian_spectrum(a, rel_tol).minCoeff();
}

double max_eigenvalue(const ComplexMatrix& a, double rel_tol) {
  return hermitian_spectrum(a, rel_tol).maxCoeff();
}

bool is_positive_semidefinite(const ComplexMatrix& a, double rel_tol) {
  if (!is_hermitian(a, 1e-10)) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -rel_tol * (a.norm() + 1.0);
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& a, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  const Eigen::VectorXd ev = es.eigenvalues();
  const double floor = -rel_tol * (a.norm() + 1.0);
  if (ev.minCoeff() < floor) {
    throw std::invalid_argument("hermitian_sqrt: matrix is not positive semidefinite");
  }
  Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix matrix_exp(const ComplexMatrix& a) { return a.exp(); }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw std::runtime_error(std::string("matrix load: bad ") + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace

void save_matrix(std::ostream& os, const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("save_matrix: matrix must be square");
  }
  os << "minqds-matrix v1\n";
  os << "dim " << a.rows() << "\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(a(i, j).real()) << ' ' << format_double(a(i, j).imag());
    }
    os << '\n';
  }
}

void save_matrix_file(const std::string& path, const ComplexMatrix& a) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_matrix_file: cannot open " + path);
  save_matrix(f, a);
  if (!f) throw std::runtime_error("save_matrix_file: write failed for " + path);
}

ComplexMatrix load_matrix(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header != "minqds-matrix v1") {
    throw std::runtime_error("matrix load: bad header '" + header + "'");
  }
  std::string key;
  long n = 0;
  is >> key >> n;
  if (!is || key != "dim" || n < 1) {
    throw std::runtime_error("matrix load: expected 'dim <n>' with n >= 1");
  }
  ComplexMatrix a(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      std::string re, im;
      if (!(is >> re >> im)) {
        throw std::runtime_error("matrix load: truncated data at row " + std::to_string(i));
      }
      a(i, j) = Complex(parse_double(re, "real part"), parse_double(im, "imag part"));
    }
  }
  return a;
}

ComplexMatrix load_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_matrix_file: cannot open " + path);
  return load_matrix(f);
}

}  // namespace minqds
