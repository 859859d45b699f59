#pragma once

#include "minqds/models.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace minqds {

/// Discrete generator of the classical reflected-reentrant Brownian motion:
/// tridiagonal half-Laplacian in the interior, row 0 implements
/// alpha f'(0) + int (f - f(0)) |g|^2 = 0 by ghost elimination, reflecting
/// right closure.  Rows sum to zero (conservative chain).
RealMatrix classical_generator_bm(const ClassicalSpec& spec);

struct PathStats {
  long n_paths = 0;
  // observable name -> (mean, standard error)
  std::map<std::string, std::pair<double, double>> estimates;
};

/// Exact-in-law sampling of the transport-jump process: deterministic unit
/// drift toward 0, jump destination drawn from the grid-quantized density
/// |g|^2.  Per-path seeds derive from (seed, path index), so results do not
/// depend on evaluation order.
PathStats simulate_transport_jump(const ClassicalSpec& spec,
                                  const std::function<double(double)>& f,
                                  const std::string& f_name, double x0, double t,
                                  long n_paths, std::uint64_t seed);

/// Same process, initial position sampled from the given grid density
/// (weights * |phi|^2, normalized); used for probe-state comparisons.
PathStats simulate_transport_jump_density(const ClassicalSpec& spec,
                                          const std::function<double(double)>& f,
                                          const std::string& f_name,
                                          const RealVector& initial_density, double t,
                                          long n_paths, std::uint64_t seed);

enum class ExplosionClass { explosive, non_explosive, undetermined };

const char* to_string(ExplosionClass c);

/// Analytic tail rule for the rate sequence: rates ~ c k^p, optionally with a
/// log^q factor at the boundary exponent p = 1.
struct TailRule {
  enum class Kind { none, poly, poly_log } kind = Kind::none;
  double p = 0.0;
  double q = 0.0;
};

struct ExplosionVerdict {
  std::vector<double> partial_sums;  // partial sums of 1/rate_k
  ExplosionClass verdict = ExplosionClass::undetermined;
};

/// Pure-birth explosion criterion: the chain explodes iff sum 1/rate_k
/// converges, decided by the supplied tail rule; partial sums are reported
/// either way.
ExplosionVerdict explosion_test(const std::vector<double>& rates, int horizon_terms,
                                const TailRule& rule);

/// Splittable per-path seed (avoids order dependence across workers).
std::uint64_t derive_path_seed(std::uint64_t root, std::uint64_t index);

}  // namespace minqds
