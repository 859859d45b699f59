#include "minqds/timedomain.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace minqds {

namespace {

constexpr Eigen::Index kSuperopDirectDim = 16;  // single-shot expm threshold
constexpr Eigen::Index kSuperopPathDim = 32;    // cached-step threshold

Eigen::Map<const ComplexVector> vec(const ComplexMatrix& X) {
  return Eigen::Map<const ComplexVector>(X.data(), X.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) {
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

}  // namespace

void EvolutionConfig::validate() const {
  if (t_final < 0.0) throw std::invalid_argument("EvolutionConfig: t_final must be >= 0");
  if (dt < 0.0) throw std::invalid_argument("EvolutionConfig: dt must be >= 0");
  if (t_final > 0.0 && dt > t_final) {
    throw std::invalid_argument("EvolutionConfig: dt must not exceed t_final");
  }
  if (picard_depth < 0) throw std::invalid_argument("EvolutionConfig: picard_depth >= 0");
}

double EvolutionConfig::effective_dt() const {
  if (dt > 0.0) return dt;
  return t_final > 0.0 ? t_final / 200.0 : 1.0 / 200.0;
}

ComplexMatrix heisenberg_superoperator(const GKSLModel& model) {
  model.validate();
  const Eigen::Index n = model.dim();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  ComplexMatrix S =
      Eigen::kroneckerProduct(I, model.G.adjoint()).eval() +
      Eigen::kroneckerProduct(model.G.transpose(), I).eval();
  for (const auto& L : model.Ls) {
    S += Eigen::kroneckerProduct(L.transpose(), L.adjoint()).eval();
  }
  return S;
}

Evolver::Evolver(const GKSLModel& model, double rtol, double atol)
    : model_(model), rtol_(rtol), atol_(atol) {
  model_.validate();
  if (model_.dim() <= kSuperopPathDim) {
    superop_ = heisenberg_superoperator(model_);
  }
}

ComplexMatrix Evolver::rhs(const ComplexMatrix& X) const {
  ComplexMatrix out = model_.G.adjoint() * X + X * model_.G;
  for (const auto& L : model_.Ls) out.noalias() += L.adjoint() * X * L;
  return out;
}

// Dormand-Prince 5(4) with a standard PI step controller.
ComplexMatrix Evolver::integrate(ComplexMatrix X, double t0, double t1) const {
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double e[7] = {35.0 / 384 - 5179.0 / 57600,
                              0.0,
                              500.0 / 1113 - 7571.0 / 16695,
                              125.0 / 192 - 393.0 / 640,
                              -2187.0 / 6784 + 92097.0 / 339200,
                              11.0 / 84 - 187.0 / 2100,
                              -1.0 / 40};

  double t = t0;
  const double span = t1 - t0;
  if (span <= 0.0) return X;
  double h = span / 16.0;
  ComplexMatrix k[7];
  k[0] = rhs(X);
  double prev_err = 1.0;
  for (long iter = 0; iter < 2000000; ++iter) {
    if (t + h > t1) h = t1 - t;
    ComplexMatrix Y;
    for (int s = 1; s < 7; ++s) {
      Y = X;
      for (int j = 0; j < s; ++j) {
        if (a[s][j] != 0.0) Y.noalias() += (h * a[s][j]) * k[j];
      }
      k[s] = rhs(Y);
    }
    // Y currently holds the 5th order solution (stage 7 uses the b-row)
    ComplexMatrix err = ComplexMatrix::Zero(X.rows(), X.cols());
    for (int s = 0; s < 7; ++s) {
      if (e[s] != 0.0) err.noalias() += (h * e[s]) * k[s];
    }
    const double scale = atol_ + rtol_ * std::max(X.norm(), Y.norm());
    const double errnorm = err.norm() / scale;
    if (errnorm <= 1.0) {
      t += h;
      X.swap(Y);
      k[0] = k[6];  // FSAL
      if (t >= t1 - 1e-14 * (std::abs(t1) + 1.0)) return X;
      const double fac =
          0.9 * std::pow(std::max(errnorm, 1e-10), -0.7 / 5.0) * std::pow(prev_err, 0.4 / 5.0);
      h *= std::min(5.0, std::max(0.2, fac));
      prev_err = std::max(errnorm, 1e-10);
    } else {
      h *= std::max(0.1, 0.9 * std::pow(errnorm, -1.0 / 5.0));
      if (h < 1e-14 * span) {
        throw std::runtime_error("Evolver: step size underflow (stiffness beyond budget)");
      }
    }
  }
  throw std::runtime_error("Evolver: step budget exhausted");
}

ComplexMatrix Evolver::at(const ComplexMatrix& X, double t) const {
  if (t < 0.0) throw std::invalid_argument("Evolver: t must be >= 0");
  if (X.rows() != model_.dim() || X.cols() != model_.dim()) {
    throw std::invalid_argument("Evolver: X dimension mismatch");
  }
  if (t == 0.0) return X;
  const bool herm = is_hermitian(X);
  ComplexMatrix out;
  if (model_.dim() <= kSuperopDirectDim) {
    out = unvec(matrix_exp(t * superop_) * vec(X), model_.dim());
  } else {
    out = integrate(X, 0.0, t);
  }
  return herm ? hermitian_part(out) : out;
}

std::vector<ComplexMatrix> Evolver::path(const ComplexMatrix& X,
                                         const std::vector<double>& ts) const {
  if (ts.empty()) return {};
  if (ts.front() != 0.0) throw std::invalid_argument("Evolver::path: ts must start at 0");
  for (size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] <= ts[i - 1]) {
      throw std::invalid_argument("Evolver::path: ts must be strictly increasing");
    }
  }
  const bool herm = is_hermitian(X);
  std::vector<ComplexMatrix> out;
  out.reserve(ts.size());
  out.push_back(X);
  // uniform grids with a small dimension step through a cached exponential
  bool uniform = true;
  const double dt0 = ts.size() > 1 ? ts[1] - ts[0] : 0.0;
  for (size_t i = 1; i + 1 < ts.size(); ++i) {
    if (std::abs((ts[i + 1] - ts[i]) - dt0) > 1e-12 * (dt0 + 1.0)) uniform = false;
  }
  if (uniform && model_.dim() <= kSuperopPathDim && ts.size() > 1) {
    const ComplexMatrix E = matrix_exp(dt0 * superop_);
    ComplexVector v = vec(X);
    for (size_t i = 1; i < ts.size(); ++i) {
      v = E * v;
      ComplexMatrix Xi = unvec(v, model_.dim());
      out.push_back(herm ? hermitian_part(Xi) : Xi);
    }
  } else {
    ComplexMatrix cur = X;
    for (size_t i = 1; i < ts.size(); ++i) {
      cur = integrate(cur, ts[i - 1], ts[i]);
      out.push_back(herm ? hermitian_part(cur) : cur);
    }
  }
  return out;
}

ComplexMatrix evolve(const GKSLModel& model, const ComplexMatrix& X, double t) {
  return Evolver(model).at(X, t);
}

namespace {

std::vector<ComplexMatrix> picard_iterates_fixed_grid(const GKSLModel& model,
                                                      const ComplexMatrix& X,
                                                      const EvolutionConfig& cfg, int m);

}  // namespace

std::vector<ComplexMatrix> picard_iterates(const GKSLModel& model,
                                           const ComplexMatrix& X,
                                           const EvolutionConfig& cfg) {
  model.validate();
  cfg.validate();
  if (!is_positive_semidefinite(X, 1e-10)) {
    throw std::invalid_argument("picard_iterates: X must be positive semidefinite");
  }
  const double t = cfg.t_final;
  if (t == 0.0) {
    return std::vector<ComplexMatrix>(cfg.picard_depth + 1, X);
  }
  int m = std::max(2, static_cast<int>(std::lround(t / cfg.effective_dt())));
  // quadrature blowup beyond the a-priori bound means the step is too coarse:
  // refine once, then give up
  const double cap = 1.1 * operator_norm(X) + 1.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto iters = picard_iterates_fixed_grid(model, X, cfg, m);
    bool stable = true;
    for (const auto& it : iters) stable = stable && operator_norm(it) <= cap;
    if (stable) return iters;
    m *= 4;
  }
  throw std::runtime_error(
      "picard_iterates: quadrature unstable even after refining dt; "
      "the convolution grid cannot resolve this generator");
}

namespace {

std::vector<ComplexMatrix> picard_iterates_fixed_grid(const GKSLModel& model,
                                                      const ComplexMatrix& X,
                                                      const EvolutionConfig& cfg, int m) {
  const Eigen::Index d = model.dim();
  const double t = cfg.t_final;
  const double dt = t / m;

  // P(j dt) and L P(j dt) for all grid offsets
  std::vector<ComplexMatrix> P(m + 1);
  P[0] = ComplexMatrix::Identity(d, d);
  const ComplexMatrix E = matrix_exp(dt * model.G);
  for (int j = 1; j <= m; ++j) P[j] = E * P[j - 1];
  const size_t nch = model.Ls.size();
  std::vector<std::vector<ComplexMatrix>> LP(nch, std::vector<ComplexMatrix>(m + 1));
  for (size_t l = 0; l < nch; ++l) {
    for (int j = 0; j <= m; ++j) LP[l][j] = model.Ls[l] * P[j];
  }

  auto quad_weights = [&](int i) {
    std::vector<double> w(i + 1, 0.0);
    if (i == 0) return w;
    if (cfg.quad_rule == QuadRule::trapezoid || i == 1) {
      for (int j = 0; j <= i; ++j) w[j] = (j == 0 || j == i) ? dt / 2 : dt;
      return w;
    }
    const int main_end = (i % 2 == 0) ? i : i - 3;
    for (int j = 0; j + 2 <= main_end; j += 2) {  // composite Simpson panels
      w[j] += dt / 3;
      w[j + 1] += 4 * dt / 3;
      w[j + 2] += dt / 3;
    }
    if (i % 2) {  // 3/8 rule on the last three panels keeps fourth order
      w[i - 3] += 3 * dt / 8;
      w[i - 2] += 9 * dt / 8;
      w[i - 1] += 9 * dt / 8;
      w[i] += 3 * dt / 8;
    }
    return w;
  };

  // iterate nr. 0: free evolution term at every grid node
  std::vector<ComplexMatrix> cur(m + 1);
  for (int i = 0; i <= m; ++i) cur[i] = hermitian_part(P[i].adjoint() * X * P[i]);

  std::vector<ComplexMatrix> result;
  result.reserve(cfg.picard_depth + 1);
  result.push_back(cur[m]);

  std::vector<ComplexMatrix> next(m + 1);
  for (int it = 1; it <= cfg.picard_depth; ++it) {
    for (int i = 0; i <= m; ++i) {
      ComplexMatrix acc = P[i].adjoint() * X * P[i];
      const auto w = quad_weights(i);
      for (int j = 0; j <= i; ++j) {
        if (w[j] == 0.0) continue;
        for (size_t l = 0; l < nch; ++l) {
          const ComplexMatrix& B = LP[l][i - j];
          acc.noalias() += w[j] * (B.adjoint() * cur[j] * B);
        }
      }
      next[i] = hermitian_part(acc);
    }
    cur.swap(next);
    result.push_back(cur[m]);
  }
  return result;
}

}  // namespace

double semigroup_property_check(const GKSLModel& model, const ComplexMatrix& X,
                                double s, double t) {
  if (s < 0.0 || t < 0.0) {
    throw std::invalid_argument("semigroup_property_check: s, t must be >= 0");
  }
  Evolver ev(model);
  const ComplexMatrix lhs = ev.at(X, t + s);
  const ComplexMatrix rhs = ev.at(ev.at(X, s), t);
  return operator_norm(lhs - rhs);
}

CrossCheck laplace_crosscheck(const GKSLModel& model, double lambda,
                              const ComplexMatrix& X, const EvolutionConfig& cfg,
                              const ResolventConfig& rcfg) {
  if (!(lambda > 0.0)) throw std::invalid_argument("laplace_crosscheck: lambda > 0");
  cfg.validate();
  const Eigen::Index d = model.dim();
  CrossCheck out;
  out.tail_bound = std::exp(-lambda * cfg.t_final) * operator_norm(X) / lambda;

  const int m0 = std::max(2, static_cast<int>(std::lround(cfg.t_final / cfg.effective_dt())));
  const int m = (cfg.quad_rule == QuadRule::simpson && m0 % 2) ? m0 + 1 : m0;
  const double dt = cfg.t_final / m;
  std::vector<double> ts(m + 1);
  for (int i = 0; i <= m; ++i) ts[i] = i * dt;
  Evolver ev(model);
  const auto traj = ev.path(X, ts);

  ComplexMatrix quad = ComplexMatrix::Zero(d, d);
  for (int i = 0; i <= m; ++i) {
    double w;
    if (cfg.quad_rule == QuadRule::simpson) {
      w = (i == 0 || i == m) ? dt / 3 : (i % 2 ? 4 * dt / 3 : 2 * dt / 3);
    } else {
      w = (i == 0 || i == m) ? dt / 2 : dt;
    }
    quad.noalias() += (w * std::exp(-lambda * ts[i])) * traj[i];
  }
  out.quad_value = quad;

  ResolventConfig rc = rcfg;
  rc.lambda = lambda;
  out.resolvent_value = neumann_resolvent(model, rc, X).R;
  out.discrepancy = operator_norm(out.quad_value - out.resolvent_value);
  return out;
}

}  // namespace minqds
