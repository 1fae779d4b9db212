#include <doctest.h>

#include <cmath>

#include "../support/gen.hpp"
#include "dflow/measure.hpp"

using namespace dflow;

TEST_CASE("total mass") {
  CHECK(total_mass(CircleMeasure::dirac(1.0)) == doctest::Approx(1.0));
  CHECK(total_mass(CircleMeasure()) == 0.0);
  CHECK(total_mass(CircleMeasure::dirac(2.0, 0.5) + CircleMeasure::lebesgue(0.5)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("density table interpolates and integrates exactly") {
  const DensityTable d{{0.0, 1.0, 3.0}, {0.0, 2.0, 1.0}};
  CHECK(d.at(0.5) == doctest::Approx(1.0));
  CHECK(d.at(2.0) == doctest::Approx(1.5));
  CHECK(d.at(-1.0) == 0.0);
  CHECK(d.at(4.0) == 0.0);
  CHECK(d.integral() == doctest::Approx(1.0 + 3.0));
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(CircleMeasure::dirac(1.0, -1.0), PreconditionError);
  CHECK_THROWS_AS(CircleMeasure({}, DensityTable{{0.0, 1.0}, {1.0}}), PreconditionError);
  CHECK_THROWS_AS(CircleMeasure({}, DensityTable{{1.0, 0.5}, {1.0, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(LineMeasure::dirac(2e6, 1.0), PreconditionError);
  CHECK_THROWS_AS(LineMeasure::dirac(0.0, std::nan("")), PreconditionError);
  HalfPlaneWeightSpec w;
  w.rho = -1.0;
  CHECK_THROWS_AS(w.validate(), PreconditionError);
}

TEST_CASE("poisson_disc") {
  gen::Rng rng(11);
  const CircleMeasure mix = CircleMeasure::dirac(1.0, 0.3) + CircleMeasure::dirac(4.0, 0.7);
  CHECK(poisson_disc(mix, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 20; ++i) CHECK(poisson_disc(CircleMeasure::lebesgue(), rng.in_disc()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(poisson_disc(CircleMeasure::dirac(0.0), 1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(poisson_disc(mix, 1.0), DomainError);
  CHECK_THROWS_AS(poisson_disc(mix, cplx(0.8, 0.8)), DomainError);
}

TEST_CASE("poisson_disc is positive and harmonic") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const CircleMeasure mu = rng.atoms(4, true);
    const cplx z0 = rng.in_disc(0.7);
    CHECK(poisson_disc(mu, z0) > 0.0);
    auto residual = [&](double h) {
      const double c = poisson_disc(mu, z0);
      const double s = poisson_disc(mu, z0 + h) + poisson_disc(mu, z0 - h) + poisson_disc(mu, z0 + cplx(0, h)) +
                       poisson_disc(mu, z0 - cplx(0, h));
      return std::abs(s - 4.0 * c) / (h * h);
    };
    const double r1 = residual(0.02), r2 = residual(0.01);
    CHECK(r2 * 3.0 <= r1 + 1e-9);
  }
}

TEST_CASE("poisson_halfplane") {
  HalfPlaneWeightSpec w;
  w.rho = 1.0;
  CHECK(poisson_halfplane(w, 2.0) == doctest::Approx(2.0));
  w.rho = 0.0;
  w.nu = LineMeasure::dirac(0.0, kPi);
  CHECK(poisson_halfplane(w, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(poisson_halfplane(w, cplx(0.0, 1.0)), DomainError);
}

TEST_CASE("poisson_halfplane equals poisson_disc of the pullback") {
  gen::Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    HalfPlaneWeightSpec w;
    w.rho = trial % 2 ? rng.uniform(0.0, 2.0) : 0.0;
    w.nu = rng.line_atoms(4);
    const CircleMeasure mu = pull_line_to_circle(w);
    for (int i = 0; i < 100; ++i) {
      const cplx s(rng.uniform(0.1, 10.0), rng.uniform(-10.0, 10.0));
      const double a = poisson_halfplane(w, s);
      CHECK(std::abs(a - poisson_disc(mu, (s - 1.0) / (s + 1.0))) <= 1e-10 * std::max(1.0, a));
    }
  }
}

TEST_CASE("boundary correspondence") {
  CHECK(theta_to_tau(kPi) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(theta_to_tau(kPi / 2) == doctest::Approx(1.0));
  gen::Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const double th = rng.uniform(0.01, kTwoPi - 0.01);
    CHECK(tau_to_theta(theta_to_tau(th)) == doctest::Approx(th).epsilon(1e-12));
  }
}

TEST_CASE("push_circle_to_line") {
  const auto a = push_circle_to_line(CircleMeasure::dirac(0.0, 2.5));
  CHECK(a.rho == 2.5);
  CHECK(a.nu.atoms().empty());

  const auto b = push_circle_to_line(CircleMeasure::dirac(kPi, 3.0));
  CHECK(b.rho == 0.0);
  REQUIRE(b.nu.atoms().size() == 1);
  CHECK(b.nu.atoms()[0].tau == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.nu.atoms()[0].mass == doctest::Approx(3.0 * kPi));

  const auto c = push_circle_to_line(CircleMeasure::dirac(kPi / 2));
  REQUIRE(c.nu.atoms().size() == 1);
  CHECK(c.nu.atoms()[0].tau == doctest::Approx(1.0));
  CHECK(c.nu.atoms()[0].mass == doctest::Approx(2.0 * kPi));

  CHECK_THROWS_AS(push_circle_to_line(CircleMeasure::lebesgue()), PreconditionError);
}

TEST_CASE("pull_line_to_circle") {
  HalfPlaneWeightSpec w;
  w.rho = 1.0;
  const auto a = pull_line_to_circle(w);
  REQUIRE(a.atoms().size() == 1);
  CHECK(a.atoms()[0].theta == 0.0);
  CHECK(a.atoms()[0].mass == 1.0);

  w.rho = 0.0;
  w.nu = LineMeasure::dirac(0.0, kPi);
  const auto b = pull_line_to_circle(w);
  REQUIRE(b.atoms().size() == 1);
  CHECK(b.atoms()[0].theta == doctest::Approx(kPi));
  CHECK(b.atoms()[0].mass == doctest::Approx(1.0));
}

TEST_CASE("push then pull is the identity on atoms and transfers mass") {
  gen::Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const CircleMeasure mu = rng.atoms(5, trial % 3 == 0);
    const HalfPlaneWeightSpec w = push_circle_to_line(mu);
    double nu_mass = 0.0;
    for (const auto& a : mu.atoms())
      if (a.theta != 0.0) nu_mass += kPi * (1.0 + std::pow(theta_to_tau(a.theta), 2)) * a.mass;
    CHECK(total_mass(w.nu) == doctest::Approx(nu_mass).epsilon(1e-12));

    const CircleMeasure back = pull_line_to_circle(w);
    REQUIRE(back.atoms().size() == mu.atoms().size());
    for (const auto& a : mu.atoms()) {
      bool found = false;
      for (const auto& b : back.atoms())
        if (std::abs(a.theta - b.theta) <= 1e-12 && std::abs(a.mass - b.mass) <= 1e-12 * a.mass) found = true;
      CHECK(found);
    }
  }
}
