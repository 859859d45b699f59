#include "minqds/gksl_model.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace minqds;

namespace {

GKSLModel scalar_model(double g, double l) {
  GKSLModel m;
  m.G = ComplexMatrix::Constant(1, 1, Complex(g, 0));
  if (l != 0.0) m.Ls = {ComplexMatrix::Constant(1, 1, Complex(l, 0))};
  return m;
}

}  // namespace

TEST_CASE("condition A classification on scalar models") {
  // g = -1/2, l = 1: D = -1 + 1 = 0 -> exact
  auto r = check_condition_a(scalar_model(-0.5, 1.0), 1e-8);
  CHECK(r.classification == ConditionAClass::exact);
  CHECK(r.defect_norm <= 1e-14);

  // g = -1, l = 1: D = -2 + 1 = -1 -> substochastic
  r = check_condition_a(scalar_model(-1.0, 1.0), 1e-8);
  CHECK(r.classification == ConditionAClass::substochastic);
  CHECK(r.defect_norm == doctest::Approx(1.0));
  CHECK(r.max_defect_eig == doctest::Approx(-1.0));

  // g = 0, l = 1: D = 1 > 0 -> violated
  r = check_condition_a(scalar_model(0.0, 1.0), 1e-8);
  CHECK(r.classification == ConditionAClass::violated);
}

TEST_CASE("apply_generator matches the independent defect assembly") {
  // exact model: L(I) = D = 0
  std::mt19937_64 rng(31);
  const GKSLModel exact = testor::random_exact_model(rng, 5, 2);
  const ComplexMatrix I5 = ComplexMatrix::Identity(5, 5);
  CHECK(operator_norm(apply_generator(exact, I5)) <= 1e-10);

  // scalar g = -1/2, l = 1, X = 5 -> 0
  const GKSLModel sc = scalar_model(-0.5, 1.0);
  CHECK(std::abs(apply_generator(sc, ComplexMatrix::Constant(1, 1, Complex(5, 0)))(0, 0)) <=
        1e-12);

  // random 3x3 substochastic: L(I) equals D assembled directly, to 1e-12
  const GKSLModel sub = testor::random_substochastic_model(rng, 3, 2);
  const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
  ComplexMatrix D = sub.G + sub.G.adjoint();
  for (const auto& L : sub.Ls) D += L.adjoint() * L;
  CHECK((apply_generator(sub, I3) - hermitian_part(D)).norm() <= 1e-12 * (D.norm() + 1));
}

TEST_CASE("apply_generator is linear and preserves hermiticity") {
  std::mt19937_64 rng(37);
  const GKSLModel m = testor::random_exact_model(rng, 6, 2);
  const ComplexMatrix X = testor::random_matrix(rng, 6, 1.0);
  const ComplexMatrix Y = testor::random_matrix(rng, 6, 1.0);
  const Complex alpha(0.7, -0.2), beta(-1.1, 0.4);
  const ComplexMatrix lhs = apply_generator(m, (alpha * X + beta * Y).eval());
  const ComplexMatrix rhs = alpha * apply_generator(m, X) + beta * apply_generator(m, Y);
  CHECK((lhs - rhs).norm() <= 1e-12 * (rhs.norm() + 1));

  const ComplexMatrix Xh = testor::random_hermitian(rng, 6, 1.0);
  const ComplexMatrix LX = apply_generator(m, Xh);
  CHECK((LX - LX.adjoint()).norm() <= 1e-12 * (LX.norm() + 1));
}

TEST_CASE("semigroup action: identity, scalar value, ODE oracle") {
  const GKSLModel sc = scalar_model(-1.0, 1.0);
  CHECK(semigroup_action(sc, 0.0)(0, 0) == Complex(1, 0));
  CHECK(semigroup_action(sc, 1.0)(0, 0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(semigroup_action(sc, -0.1), std::invalid_argument);

  // 8x8 tridiagonal G: matches RK4 column evolution to 1e-9
  GKSLModel tri;
  tri.G = ComplexMatrix::Zero(8, 8);
  for (int k = 0; k < 8; ++k) {
    tri.G(k, k) = Complex(-1.0, 0.1 * k);
    if (k + 1 < 8) tri.G(k, k + 1) = Complex(0.5, 0.0);
    if (k - 1 >= 0) tri.G(k, k - 1) = Complex(0.4, -0.1);
  }
  const ComplexMatrix E = semigroup_action(tri, 0.9);
  const ComplexMatrix R = testor::rk4_expm(tri.G, 0.9, 6000);
  CHECK((E - R).norm() <= 1e-9);
}

TEST_CASE("contraction property on sampled times") {
  std::mt19937_64 rng(41);
  for (const GKSLModel& m : {testor::random_exact_model(rng, 6, 2),
                             testor::random_substochastic_model(rng, 6, 2)}) {
    for (int i = 1; i <= 10; ++i) {
      CHECK(operator_norm(semigroup_action(m, 0.25 * i)) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("model validation catches structural errors") {
  GKSLModel bad;
  bad.G = ComplexMatrix::Identity(3, 3);
  bad.Ls = {ComplexMatrix::Identity(2, 2)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  std::mt19937_64 rng(43);
  GKSLModel split = testor::random_exact_model(rng, 4, 1);
  split.H = testor::random_hermitian(rng, 4, 1.0);  // inconsistent with G
  CHECK_THROWS_AS(split.validate(), std::invalid_argument);
}
