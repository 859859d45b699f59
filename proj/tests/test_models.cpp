#include "minqds/models.hpp"

#include "minqds/resolvent.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace minqds;

namespace {

double sqrt2_exp(double x) { return std::sqrt(2.0) * std::exp(-x); }

}  // namespace

TEST_CASE("reflected BM: theta from grid quadrature, pure reflection limit") {
  HalfLineGrid grid{128, 20.0};
  const ModelBundle b = build_reflected_bm(1.0, sqrt2_exp, grid);
  // ||g||^2 = int 2 e^{-2x} = 1, theta = 1/2 up to quadrature error
  CHECK(std::abs(b.model.grid->theta - 0.5) <= grid.h());

  const ModelBundle refl = build_reflected_bm(1.0, [](double) { return 0.0; }, grid);
  CHECK(refl.model.grid->theta == 0.0);
  CHECK(refl.model.Ls[1].norm() == 0.0);  // L2 vanishes
  CHECK_THROWS_AS(build_reflected_bm(-1.0, sqrt2_exp, grid), std::invalid_argument);
}

TEST_CASE("reflected BM: substochastic with O(h) boundary defect halving") {
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    HalfLineGrid grid{n, 20.0};
    const ModelBundle b = build_reflected_bm(1.0, sqrt2_exp, grid);
    const auto rep = check_condition_a(b.model, 1e-8);
    CHECK(rep.classification == ConditionAClass::substochastic);
    if (prev > 0.0) {
      CHECK(prev / b.boundary_defect >= 1.5);  // halves within factor 1.5
    }
    prev = b.boundary_defect;
  }
}

TEST_CASE("reflected BM: reference-form identity on the test family within O(h)") {
  for (int n : {64, 128}) {
    HalfLineGrid grid{n, 20.0};
    const ModelBundle b = build_reflected_bm(1.0, sqrt2_exp, grid);
    const ComplexMatrix& C = b.reference.C;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < b.probes.cols(); ++j) {
      const ComplexVector u = b.probes.col(j);
      const double cu = (u.adjoint() * C * u).value().real();
      const double l1 = (b.model.Ls[0] * u).squaredNorm();
      const double l2 = (b.model.Ls[1] * u).squaredNorm();
      worst = std::max(worst, std::abs(cu - l1 - l2));
    }
    CHECK(worst <= 35.0 * grid.h());
  }
}

TEST_CASE("transport model: grid normalization, rank-one algebra, defect location") {
  HalfLineGrid grid{128, 20.0};
  const ModelBundle b = build_transport_jump(sqrt2_exp, grid);
  const auto rep = check_condition_a(b.model, 1e-8);
  CHECK(rep.classification == ConditionAClass::substochastic);

  // L^*L acts as the |u(0)|^2 functional: trace equals the quadrature weight scale
  const ComplexMatrix LL = b.model.Ls[0].adjoint() * b.model.Ls[0];
  CHECK(std::abs(LL.trace().real() - 1.0 / grid.h()) <= 1e-9 / grid.h());
  // the x=0 row of the defect cancels exactly for grid-normalized g
  const ComplexMatrix D = dissipation_defect(b.model);
  CHECK(std::abs(D(0, 0).real() + 1.0 / grid.h()) <= 1e-9 / grid.h());

  // unnormalized g without the flag is rejected
  CHECK_THROWS_AS(build_transport_jump([](double x) { return 2.0 * std::exp(-x); },
                                       grid, false),
                  std::invalid_argument);
}

TEST_CASE("transport model: boundary defect halves under refinement") {
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    HalfLineGrid grid{n, 20.0};
    const ModelBundle b = build_transport_jump(sqrt2_exp, grid);
    if (prev > 0.0) CHECK(prev / b.boundary_defect >= 1.5);
    prev = b.boundary_defect;
  }
}

TEST_CASE("heavy ion: hamiltonian limit, noise bound enforcement, finite b shift") {
  HalfLineGrid grid{65, 8.0};
  // W = 0: purely hamiltonian, defect 0, b = 0 against C = -lap + 1
  const ModelBundle free = build_heavy_ion_1d(
      1.0, 1.0, [](double) { return 0.0; }, [](double) { return 0.0; }, grid);
  CHECK(free.model.Ls[0].norm() == 0.0);
  CHECK(check_condition_a(free.model, 1e-8).classification == ConditionAClass::exact);
  const BEstimate b0 = estimate_b(free.model, free.reference);
  CHECK(std::abs(b0.b) <= 1e-8);

  // sup|W|^2 >= 1/(m alpha^2) rejected citing the hypothesis
  CHECK_THROWS_AS(build_heavy_ion_1d(1.0, 1.0, [](double) { return 0.0; },
                                     [](double) { return 1.1; }, grid),
                  std::invalid_argument);

  // W = 0.5 passes (0.25 < 1); V = tanh shifts b by at most ~sup|V'|
  const ModelBundle noisy = build_heavy_ion_1d(
      1.0, 1.0, [](double) { return 0.0; }, [](double) { return 0.5; }, grid);
  CHECK(check_condition_a(noisy.model, 1e-8).classification == ConditionAClass::exact);
  const double b_flat = estimate_b(noisy.model, noisy.reference).b;
  const ModelBundle tilted = build_heavy_ion_1d(
      1.0, 1.0, [](double x) { return std::tanh(x); }, [](double) { return 0.5; }, grid);
  const double b_tilt = estimate_b(tilted.model, tilted.reference).b;
  CHECK(std::abs(b_tilt - b_flat) <= 2.0 * 1.0 + 0.1);  // sup|V'| = 1
  // Phi <= C by the sizing of c
  const Margin m = dominance_check(noisy.phi->Phi, noisy.reference.C, 1e-10);
  CHECK(m.pass);
}

TEST_CASE("birth process: assembly, Poisson decay, explosive defect stability") {
  // N = 2, rates {1, 2}: defect concentrated on the last state
  const ModelBundle tiny = build_birth_process({1.0, 2.0}, 2);
  const ComplexMatrix D = dissipation_defect(tiny.model);
  CHECK(std::abs(D(0, 0).real()) <= 1e-14);
  CHECK(D(1, 1).real() == doctest::Approx(-2.0));
  CHECK_THROWS_AS(build_birth_process({1.0}, 1), std::invalid_argument);

  // constant rates: geometric decay of Q^n(I), conservative verdict
  std::vector<double> flat(24, 1.0);
  const ModelBundle poisson = build_birth_process(flat, 24);
  ResolventConfig cfg;
  cfg.lambda = 1.0;
  cfg.max_terms = 40;
  const DefectSequence seq = defect_iteration(poisson.model, cfg, poisson.probes);
  CHECK(seq.verdict == DefectVerdict::conservative_at_tol);
  CHECK(seq.term_norms[5] == doctest::Approx(std::pow(0.5, 5)).epsilon(1e-9));

  // quadratic rates: probe defect stable across N and matching the kill solve
  double prev = -1.0;
  for (int N : {40, 80}) {
    std::vector<double> rates(N);
    for (int k = 0; k < N; ++k) rates[k] = double(k + 1) * double(k + 1);
    const ModelBundle b = build_birth_process(rates, N);
    ResolventConfig c2;
    c2.lambda = 1.0;
    c2.max_terms = N + 8;
    const DefectSequence s = defect_iteration(b.model, c2, b.probes);
    CHECK(s.verdict == DefectVerdict::defect_detected);
    CHECK(s.probe_defect >= 0.1);
    if (prev > 0.0) CHECK(std::abs(s.probe_defect - prev) / prev <= 0.1);
    prev = s.probe_defect;
  }
}

TEST_CASE("build_reference: Neumann limit, spectrum bound, Robin form") {
  HalfLineGrid grid{64, 20.0};
  // minus_two_G with theta = 0 reduces to the Neumann stencil and is PSD
  const ReferenceOperator neu = build_reference(ReferenceKind::minus_two_G, 0.0, grid);
  CHECK(min_eigenvalue(neu.C) >= -1e-10);

  // laplacian_plus_one with c = 1: spectrum inside [1, 1 + 4/h^2]
  const ReferenceOperator lap = build_reference(ReferenceKind::laplacian_plus_one, 1.0, grid);
  const double h = grid.h();
  CHECK(min_eigenvalue(lap.C) >= 1.0 - 1e-9);
  CHECK(max_eigenvalue(lap.C) <= 1.0 + 4.0 / (h * h) + 1e-9);

  // robin_laplacian: the quadratic form is 2||u'||^2 + 2|u(0)|^2
  const ReferenceOperator rob = build_reference(ReferenceKind::robin_laplacian, 1.0, grid);
  const RealVector x = grid.nodes();
  RealVector u(grid.n_points);
  for (int k = 0; k < grid.n_points; ++k) u(k) = std::exp(-x(k));
  const RealVector w = RealVector::Constant(grid.n_points, h);
  ComplexVector v = (w.cwiseSqrt().cwiseProduct(u)).cast<Complex>();
  const double form = (v.adjoint() * rob.C * v).value().real();
  // continuum: 2 ||u'||^2 + 2 |u(0)|^2 = 2*(1/2) + 2 = 3
  CHECK(form == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("test family: decay enforcement and normalization") {
  HalfLineGrid grid{128, 20.0};
  const RealVector w = RealVector::Constant(grid.n_points, grid.h());
  const ComplexMatrix fam = decaying_test_family(grid, w);
  CHECK(fam.cols() == 20);
  for (Eigen::Index j = 0; j < fam.cols(); ++j) {
    CHECK(fam.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fam(grid.n_points - 1, j)) <= 2e-6);
  }
}
