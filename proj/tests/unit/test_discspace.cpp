#include <doctest.h>

#include <cmath>

#include "../support/gen.hpp"
#include "dflow/discspace.hpp"

using namespace dflow;

namespace {

CircleMeasure mixture() {
  return CircleMeasure::dirac(kPi, 0.5) + CircleMeasure::dirac(kPi / 2, 0.25) + CircleMeasure::lebesgue(0.25);
}

}  // namespace

TEST_CASE("quadrature budgets are validated") {
  DiscQuadrature q;
  q.n_r = 3;
  CHECK_THROWS_AS(q.validate(), PreconditionError);
  CHECK_THROWS_AS(dirichlet_energy(DiscFunction::monomial(1), CircleMeasure::lebesgue(), q), PreconditionError);
}

TEST_CASE("function combinators") {
  CHECK_THROWS_AS(DiscFunction::cayley_exp(cplx(0.5, 0.0)), PreconditionError);
  CHECK_THROWS_AS(DiscFunction::monomial(-1), PreconditionError);
  const DiscFunction f = DiscFunction::polynomial({1.0, 2.0}) * DiscFunction::polynomial({0.0, 1.0});
  CHECK(std::abs(f(0.5) - 1.0) < 1e-15);
  CHECK(DiscFunction::inner_exp(1.0).boundary_singularities().size() == 1);
  CHECK_FALSE(DiscFunction::inner_exp(1.0).boundary_value(0.0).has_value());
  CHECK(std::abs(*DiscFunction::inner_exp(1.0).boundary_value(kPi) - 1.0) < 1e-15);
}

TEST_CASE("derivatives agree with central differences") {
  gen::Rng rng(21);
  const std::vector<DiscFunction> fs{DiscFunction::polynomial(rng.poly(6)), DiscFunction::inner_exp(0.7),
                                     DiscFunction::cayley_exp(cplx(-0.3, 1.2)) * DiscFunction::polynomial(rng.poly(3)),
                                     DiscFunction::automorphism(cplx(0.3, -0.2), 0.4)};
  for (const auto& f : fs)
    for (int i = 0; i < 10; ++i) {
      const cplx z = rng.in_disc(0.8);
      auto err = [&](double h) { return std::abs(f.derivative(z) - (f(z + h) - f(z - h)) / (2.0 * h)); };
      const double e1 = err(1e-3), e2 = err(5e-4);
      CHECK(e2 <= std::max(0.3 * e1, 1e-9));
    }
}

TEST_CASE("h2_norm_sq") {
  CHECK(h2_norm_sq(DiscFunction::monomial(5)).value == 1.0);
  CHECK(h2_norm_sq(DiscFunction::polynomial({1.0, 2.0, 3.0})).value == 14.0);
  for (double t : {0.1, 1.0, 3.0}) CHECK(h2_norm_sq(DiscFunction::inner_exp(t)).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("local_dirichlet") {
  for (int n = 1; n <= 6; ++n) {
    const Estimate e = local_dirichlet(DiscFunction::monomial(n), 0.0, 1.0);
    CHECK(e.status == Convergence::converged);
    CHECK(e.value == doctest::Approx(n).epsilon(1e-10));
  }
  CHECK(local_dirichlet(DiscFunction::constant(2.0), 1.0, 2.0).value == 0.0);
  CHECK(local_dirichlet(DiscFunction::inner_exp(1.0), 0.0, 0.0).status == Convergence::divergent);
}

TEST_CASE("dirichlet_energy examples") {
  CHECK(dirichlet_energy(DiscFunction::monomial(3), CircleMeasure::lebesgue()).value == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(dirichlet_energy(DiscFunction::constant(4.0), mixture()).value == 0.0);
  const DiscFunction f = DiscFunction::polynomial({0.5, -0.5});
  CHECK(dirichlet_energy(f, CircleMeasure::dirac(0.0)).value == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("richter and equivalent norms") {
  for (int n = 0; n <= 5; ++n)
    CHECK(richter_norm_sq(DiscFunction::monomial(n), mixture()).value == doctest::Approx(1.0 + n).epsilon(1e-9));
  CHECK(richter_norm_sq(DiscFunction::constant(1.0), mixture()).value == doctest::Approx(1.0));
  CHECK(eqnorm_sq(DiscFunction::constant(1.0), mixture()).value == doctest::Approx(1.0));
  CHECK(eqnorm_sq(DiscFunction::monomial(2), CircleMeasure()).value == 0.0);
}

TEST_CASE("singular inner function in D(delta_{-1})") {
  // D_{-1}(phi_t) = integral of (1 - cos(t u)) / (2 pi u^2) du = t/2 in u = cot(theta/2).
  const CircleMeasure mu = CircleMeasure::dirac(kPi);
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const DiscFunction f = DiscFunction::inner_exp(t);
    CHECK(richter_norm_sq(f, mu).value == doctest::Approx(1.0 + t / 2.0).epsilon(1e-6));
    CHECK(boundary_energy(f, mu).value == doctest::Approx(t / 2.0).epsilon(1e-2));
  }
  CHECK(dirichlet_energy(DiscFunction::inner_exp(1.0), CircleMeasure::dirac(0.0)).status == Convergence::divergent);
}

TEST_CASE("monomial law over mixed measures") {
  gen::Rng rng(22);
  for (int trial = 0; trial < 4; ++trial) {
    const CircleMeasure mu = rng.atoms(3) + CircleMeasure::lebesgue(rng.uniform(0.1, 2.0));
    for (int n = 1; n <= 10; ++n)
      CHECK(dirichlet_energy(DiscFunction::monomial(n), mu).value ==
            doctest::Approx(n * total_mass(mu)).epsilon(1e-6));
  }
}

TEST_CASE("energy is additive in the measure and quadratic in the function") {
  gen::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscFunction f = DiscFunction::polynomial(rng.poly(5));
    const CircleMeasure m1 = rng.atoms(3), m2 = rng.atoms(3);
    const double e1 = dirichlet_energy(f, m1).value, e2 = dirichlet_energy(f, m2).value;
    CHECK(std::abs(dirichlet_energy(f, m1 + m2).value - (e1 + e2)) <= 1e-10 * std::max(1.0, e1 + e2));
    const cplx c = rng.complex(3.0);
    CHECK(dirichlet_energy(c * f, m1).value == doctest::Approx(std::norm(c) * e1).epsilon(1e-12));
  }
}

TEST_CASE("area energy matches the atom sum of local Dirichlet integrals") {
  gen::Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscFunction f = DiscFunction::polynomial(rng.poly(6));
    const CircleMeasure mu = rng.atoms(4, trial % 2 == 0);
    double sum = 0.0;
    for (const auto& a : mu.atoms()) sum += a.mass * local_dirichlet(f, a.theta, *f.boundary_value(a.theta)).value;
    CHECK(dirichlet_energy(f, mu).value == doctest::Approx(sum).epsilon(1e-6));
    CHECK(boundary_energy(f, mu).value == doctest::Approx(sum).epsilon(1e-10));
  }
}
