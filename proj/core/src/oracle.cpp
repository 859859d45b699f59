#include "minqds/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace minqds {

RealMatrix classical_generator_bm(const ClassicalSpec& spec) {
  if (spec.kind != ClassicalKind::reflected_bm_reentrance) {
    throw std::invalid_argument("classical_generator_bm: spec kind mismatch");
  }
  spec.grid.validate();
  const int n = spec.grid.n_points;
  if (spec.g.size() != n || spec.weights.size() != n) {
    throw std::invalid_argument("classical_generator_bm: parameter sizes mismatch grid");
  }
  const double h = spec.grid.h();
  RealMatrix A = RealMatrix::Zero(n, n);
  for (int k = 1; k + 1 < n; ++k) {
    A(k, k - 1) = 1.0 / (2 * h * h);
    A(k, k) = -1.0 / (h * h);
    A(k, k + 1) = 1.0 / (2 * h * h);
  }
  // ghost elimination of the nonlocal condition
  // alpha f'(0) + sum_k w_k (f_k - f_0) |g_k|^2 = 0
  A(0, 0) = -1.0 / (h * h);
  A(0, 1) = 1.0 / (h * h);
  const RealVector jump = spec.weights.cwiseProduct(spec.g.cwiseAbs2()) / (spec.alpha * h);
  A.row(0) += jump.transpose();
  A(0, 0) -= jump.sum();
  // reflecting right closure keeps the chain conservative
  A(n - 1, n - 2) = 1.0 / (h * h);
  A(n - 1, n - 1) = -1.0 / (h * h);
  return A;
}

std::uint64_t derive_path_seed(std::uint64_t root, std::uint64_t index) {
  // splitmix64 over the combined word
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct JumpSampler {
  std::vector<double> cdf;
  const RealVector* nodes;

  explicit JumpSampler(const ClassicalSpec& spec, const RealVector& x)
      : nodes(&x) {
    const RealVector p = spec.weights.cwiseProduct(spec.g.cwiseAbs2());
    cdf.resize(p.size());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      acc += p(k);
      cdf[k] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("transport jump: g vanishes");
    for (auto& c : cdf) c /= acc;
  }

  double operator()(double u) const {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(),
                                              static_cast<std::ptrdiff_t>(cdf.size()) - 1);
    return (*nodes)(idx);
  }
};

PathStats run_transport_paths(const ClassicalSpec& spec,
                              const std::function<double(double)>& f,
                              const std::string& f_name,
                              const std::function<double(std::mt19937_64&)>& draw_x0,
                              double t, long n_paths, std::uint64_t seed) {
  if (spec.kind != ClassicalKind::transport_jump) {
    throw std::invalid_argument("simulate_transport_jump: spec kind mismatch");
  }
  if (t < 0.0) throw std::invalid_argument("simulate_transport_jump: t must be >= 0");
  spec.grid.validate();
  const RealVector x = spec.grid.nodes();
  const double gnorm = spec.weights.cwiseProduct(spec.g.cwiseAbs2()).sum();
  if (std::abs(gnorm - 1.0) > 1e-8) {
    throw std::invalid_argument("simulate_transport_jump: g is not normalized on the grid");
  }
  JumpSampler jump(spec, x);

  std::vector<double> values(static_cast<size_t>(n_paths));
  for (long p = 0; p < n_paths; ++p) {
    std::mt19937_64 rng(derive_path_seed(seed, static_cast<std::uint64_t>(p)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double pos = draw_x0(rng);
    double rem = t;
    // drift toward 0 at unit speed; at 0 jump to a fresh |g|^2 sample
    long hops = 0;
    while (rem > pos) {
      rem -= pos;
      pos = jump(unif(rng));
      if (++hops > 1000000) {
        throw std::runtime_error("simulate_transport_jump: jump density is degenerate at 0");
      }
    }
    values[static_cast<size_t>(p)] = f(pos - rem);
  }
  PathStats ps;
  ps.n_paths = n_paths;
  bool constant = true;
  for (double v : values) constant = constant && (v == values.front());
  if (constant) {  // deterministic segment: exact value, no sampling error
    ps.estimates[f_name] = {values.front(), 0.0};
    return ps;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n_paths;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n_paths;
  ps.estimates[f_name] = {mean, std::sqrt(var / n_paths)};
  return ps;
}

}  // namespace

PathStats simulate_transport_jump(const ClassicalSpec& spec,
                                  const std::function<double(double)>& f,
                                  const std::string& f_name, double x0, double t,
                                  long n_paths, std::uint64_t seed) {
  if (x0 < 0.0) throw std::invalid_argument("simulate_transport_jump: x0 must be >= 0");
  return run_transport_paths(
      spec, f, f_name, [x0](std::mt19937_64&) { return x0; }, t, n_paths, seed);
}

PathStats simulate_transport_jump_density(const ClassicalSpec& spec,
                                          const std::function<double(double)>& f,
                                          const std::string& f_name,
                                          const RealVector& initial_density, double t,
                                          long n_paths, std::uint64_t seed) {
  const RealVector x = spec.grid.nodes();
  if (initial_density.size() != x.size()) {
    throw std::invalid_argument("simulate_transport_jump_density: density size mismatch");
  }
  std::vector<double> cdf(initial_density.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < initial_density.size(); ++k) {
    if (initial_density(k) < 0.0) {
      throw std::invalid_argument("simulate_transport_jump_density: negative density");
    }
    acc += initial_density(k);
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("simulate_transport_jump_density: zero density");
  for (auto& c : cdf) c /= acc;
  auto draw = [&cdf, &x](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(),
                                              static_cast<std::ptrdiff_t>(cdf.size()) - 1);
    return x(idx);
  };
  return run_transport_paths(spec, f, f_name, draw, t, n_paths, seed);
}

const char* to_string(ExplosionClass c) {
  switch (c) {
    case ExplosionClass::explosive: return "explosive";
    case ExplosionClass::non_explosive: return "non_explosive";
    case ExplosionClass::undetermined: return "undetermined";
  }
  return "?";
}

ExplosionVerdict explosion_test(const std::vector<double>& rates, int horizon_terms,
                                const TailRule& rule) {
  ExplosionVerdict out;
  double acc = 0.0;
  const int m = std::min<int>(horizon_terms, static_cast<int>(rates.size()));
  for (int k = 0; k < m; ++k) {
    if (!(rates[k] > 0.0)) {
      throw std::invalid_argument("explosion_test: rates must be positive");
    }
    acc += 1.0 / rates[k];
    out.partial_sums.push_back(acc);
  }
  switch (rule.kind) {
    case TailRule::Kind::poly:
      out.verdict = rule.p > 1.0 ? ExplosionClass::explosive
                                 : ExplosionClass::non_explosive;
      break;
    case TailRule::Kind::poly_log:
      if (rule.p > 1.0) {
        out.verdict = ExplosionClass::explosive;
      } else if (rule.p < 1.0) {
        out.verdict = ExplosionClass::non_explosive;
      } else {
        out.verdict = rule.q > 1.0 ? ExplosionClass::explosive
                                   : ExplosionClass::non_explosive;
      }
      break;
    case TailRule::Kind::none:
      out.verdict = ExplosionClass::undetermined;
      break;
  }
  return out;
}

}  // namespace minqds
