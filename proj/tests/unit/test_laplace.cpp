#include <doctest.h>

#include <chrono>
#include <cmath>

#include "../support/gen.hpp"
#include "dflow/laplace.hpp"

using namespace dflow;

namespace {

TimeFunction t_exp(double a) { return TimeFunction::exp_poly({{1, a, 1.0}}); }

HalfPlaneWeightSpec nu_pi_delta0() {
  HalfPlaneWeightSpec w;
  w.rho = 0.0;
  w.nu = LineMeasure::dirac(0.0, kPi);
  return w;
}

TimeFunction random_exp_poly(gen::Rng& rng, int k_min) {
  std::vector<ExpPolyTerm> terms;
  const int n = rng.integer(1, 3);
  for (int i = 0; i < n; ++i) terms.push_back({rng.integer(k_min, k_min + 2), rng.uniform(0.5, 3.0), rng.complex()});
  return TimeFunction::exp_poly(terms);
}

TimeFunction sampled_bump() {
  std::vector<double> grid;
  std::vector<cplx> values;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.1 * i;
    grid.push_back(t);
    values.push_back(t * std::exp(-t) * cplx(1.0, 0.3 * std::sin(t)));
  }
  return TimeFunction::samples(grid, values, 1.0);
}

}  // namespace

TEST_CASE("time functions") {
  CHECK_THROWS_AS(TimeFunction::exp_poly({{0, 0.0, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(TimeFunction::exp_poly({{-1, 1.0, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(TimeFunction::samples({0.0, 0.5, 0.4}, {1.0, 1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(TimeFunction::samples({0.1, 0.5}, {1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(right_shift(t_exp(1.0), -0.5), PreconditionError);
  const TimeFunction f = t_exp(2.0);
  CHECK(std::abs(f(0.5) - 0.5 * std::exp(-1.0)) < 1e-15);
  const TimeFunction g = right_shift(f, 1.0);
  CHECK(g(0.7) == cplx(0.0));
  CHECK(std::abs(g(1.5) - f(0.5)) < 1e-15);
  CHECK(TimeFunction::zero().is_zero());
}

TEST_CASE("laplace transform examples") {
  gen::Rng rng(51);
  for (double a : {0.5, 1.0, 2.0}) {
    const TimeFunction e = TimeFunction::exp(a), te = t_exp(a);
    for (int i = 0; i < 10; ++i) {
      const cplx s(rng.uniform(0.1, 5.0), rng.uniform(-5.0, 5.0));
      CHECK(std::abs(laplace(e, s) - 1.0 / (s + a)) <= 1e-14);
      CHECK(std::abs(laplace(te, s) - 1.0 / ((s + a) * (s + a))) <= 1e-14);
      CHECK(std::abs(laplace_quadrature(e, s) - 1.0 / (s + a)) <= 1e-10);
      CHECK(std::abs(laplace_quadrature(te, s) - 1.0 / ((s + a) * (s + a))) <= 1e-10);
    }
  }
  CHECK(laplace(TimeFunction::zero(), 1.0) == cplx(0.0));
  CHECK_THROWS_AS(laplace(t_exp(1.0), cplx(0.0, 1.0)), DomainError);
  CHECK_THROWS_AS(laplace(t_exp(1.0), -1.0), DomainError);
}

TEST_CASE("sampled functions") {
  gen::Rng rng(52);
  const TimeFunction f = sampled_bump();
  const HalfPlaneFunction F = laplace_transform(f);
  for (int i = 0; i < 10; ++i) {
    const cplx s(rng.uniform(0.2, 4.0), rng.uniform(-6.0, 6.0));
    CHECK(std::abs(laplace(f, s) - laplace_quadrature(f, s)) <= 1e-12);
    CHECK(std::abs(F(s) - laplace(f, s)) <= 1e-14);
  }
  const TimeFunction bare = TimeFunction::samples({0.0, 1.0}, {0.0, 1.0});
  CHECK_THROWS_AS(laplace(bare, 1.0), PreconditionError);
  CHECK(item3_check(f, 0.5).passed());
}

TEST_CASE("derivative of the transform uses the standard sign") {
  gen::Rng rng(53);
  // L[t * t e^{-t}] = 2/(s+1)^3, so F' = -2/(s+1)^3 for F = L[t e^{-t}].
  const HalfPlaneFunction T = laplace_transform(t_exp(1.0));
  for (int i = 0; i < 5; ++i) {
    const cplx s(rng.uniform(0.3, 3.0), rng.uniform(-3.0, 3.0));
    CHECK(std::abs(T.derivative(s) + 2.0 / std::pow(s + 1.0, 3)) <= 1e-14);
  }
  for (const TimeFunction& f : {sampled_bump(), right_shift(TimeFunction::exp(2.0), 0.5)}) {
    const HalfPlaneFunction F = laplace_transform(f);
    for (int i = 0; i < 5; ++i) {
      const cplx s(rng.uniform(0.3, 3.0), rng.uniform(-3.0, 3.0));
      const double h = 1e-5;
      CHECK(std::abs(F.derivative(s) - (F(s + h) - F(s - h)) / (2.0 * h)) <= 1e-8);
    }
  }
}

TEST_CASE("Bergman norm against the time side") {
  for (double a : {0.5, 1.0, 2.0}) {
    const double ref = kPi / (4.0 * a);
    CHECK(bergman_norm_sq(laplace_transform(t_exp(a)), 1.0).value == doctest::Approx(ref).epsilon(1e-5));
    CHECK(timeside_norm_sq(t_exp(a), 1.0).value == doctest::Approx(ref).epsilon(1e-8));
  }
  CHECK(timeside_norm_sq(TimeFunction::zero(), 1.0).value == 0.0);
  CHECK(bergman_norm_sq(laplace_transform(TimeFunction::zero()), 1.0).value == 0.0);
  CHECK(timeside_norm_sq(TimeFunction::exp(1.0), 1.0).status == Convergence::divergent);
  CHECK(bergman_norm_sq(laplace_transform(TimeFunction::exp(1.0)), 1.0).status == Convergence::divergent);
  CHECK_THROWS_AS(timeside_norm_sq(t_exp(1.0), -1.0), PreconditionError);
}

TEST_CASE("Bergman and time-side norms agree across alpha") {
  gen::Rng rng(54);
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    const int k_min = alpha < 2.0 ? 1 : 2;
    for (int trial = 0; trial < 3; ++trial) {
      const TimeFunction g = random_exp_poly(rng, k_min);
      const Estimate t = timeside_norm_sq(g, alpha);
      const Estimate b = bergman_norm_sq(laplace_transform(g), alpha);
      REQUIRE(t.finite());
      REQUIRE(b.finite());
      CHECK(b.value == doctest::Approx(t.value).epsilon(1e-5));
    }
  }
}

TEST_CASE("time-side norm polarizes") {
  gen::Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const TimeFunction g1 = random_exp_poly(rng, 1), g2 = random_exp_poly(rng, 1);
    const double p = timeside_norm_sq(g1 + g2, 1.0).value, m = timeside_norm_sq(g1 + (-1.0) * g2, 1.0).value;
    const double n1 = timeside_norm_sq(g1, 1.0).value, n2 = timeside_norm_sq(g2, 1.0).value;
    CHECK(std::abs(p + m - 2.0 * (n1 + n2)) <= 1e-8 * std::max(1.0, p + m));
  }
}

TEST_CASE("Plancherel items") {
  const Report r2 = item2_check(TimeFunction::exp(1.0));
  CHECK(r2.passed());
  CHECK(r2.find("item2")->value == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r2.find("item2")->reference.value() == doctest::Approx(0.25).epsilon(1e-14));

  const Report z = item3_check(TimeFunction::zero(), 0.0);
  CHECK(z.passed());
  CHECK(z.find("item3")->value == 0.0);

  for (double tau : {0.0, 1.0, -2.5}) CHECK(item3_check(TimeFunction::exp(1.0), tau).passed());
}

TEST_CASE("prefix transform") {
  const TimeFunction f = TimeFunction::exp(1.0);
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(0.2 * i);
  const auto P = prefix_transform(f, 0.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    CHECK(std::abs(P[i] - (1.0 - (1.0 + t) * std::exp(-t))) <= 1e-13);
  }
  // tau = 1: integral of u e^{-(1+i)u} du = (1 - (1 + c t) e^{-c t}) / c^2 with c = 1 + i.
  const cplx c(1.0, 1.0);
  const auto Q = prefix_transform(f, 1.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    CHECK(std::abs(Q[i] - (1.0 - (1.0 + c * t) * std::exp(-c * t)) / (c * c)) <= 1e-13);
  }
}

TEST_CASE("prefix transform time is linear in the grid size") {
  const TimeFunction f = sampled_bump() + t_exp(0.7);
  auto per_point = [&](int n) {
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = 40.0 * (i + 1) / n;
    double best = INFINITY;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto P = prefix_transform(f, 1.3, grid);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      CHECK(P.size() == grid.size());
      best = std::min(best, dt);
    }
    return best / n;
  };
  per_point(1 << 15);  // warm-up
  const double half = per_point(1 << 16), full = per_point(1 << 17);
  CHECK(full <= 1.5 * half);
}

TEST_CASE("h-space norm") {
  HalfPlaneWeightSpec rho1;
  rho1.rho = 1.0;
  CHECK(h_norm_sq(TimeFunction::exp(1.0), {rho1}).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h_norm_sq(TimeFunction::zero(), {rho1}).value == 0.0);

  const HalfPlaneWeightSpec w = nu_pi_delta0();
  const double h = h_norm_sq(TimeFunction::exp(1.0), {w}).value;
  const double d = dtilde_norm_sq(HalfPlaneFunction::rational({1.0}, {1.0, 1.0}), w).value;
  CHECK(h == doctest::Approx(d).epsilon(1e-5));

  HNormSpec bare{w, false, true};
  const double hb = h_norm_sq(TimeFunction::exp(1.0), bare).value;
  // Without the evaluation term and the 1/(2 pi) factor.
  CHECK(hb == doctest::Approx((h - 0.25) * 2.0 * kPi).epsilon(1e-10));
}

TEST_CASE("right shift") {
  gen::Rng rng(56);
  const TimeFunction f = t_exp(1.5) + sampled_bump();
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0, 2), r = rng.uniform(0, 2), x = rng.uniform(0, 6);
    CHECK(right_shift(right_shift(f, t), r)(x) == right_shift(f, t + r)(x));
  }
  HNormSpec spec{nu_pi_delta0()};
  CHECK(h_norm_sq(right_shift(f, 0.0), spec).value == h_norm_sq(f, spec).value);

  for (int i = 0; i < 10; ++i) {
    const double t = rng.uniform(0, 3);
    const cplx s(rng.uniform(0.1, 4.0), rng.uniform(-4.0, 4.0));
    const cplx lhs = laplace(right_shift(f, t), s), rhs = std::exp(-t * s) * laplace(f, s);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("shift correspondence") {
  const std::vector<double> times{0.0, 0.5, 1.0};
  const Report r = shift_correspondence_check(TimeFunction::exp(1.0), {nu_pi_delta0()}, times);
  CHECK(r.passed());
  for (const char* name : {"norm_match[t=0]", "norm_match[t=0.5]", "norm_match[t=1]"}) {
    REQUIRE(r.find(name));
    CHECK(r.find(name)->residual <= 1e-4);
  }
  CHECK(r.find("affine_residual"));
  CHECK_FALSE(r.find("affine_residual")->gated);
}
