#include <doctest.h>

#include <cmath>

#include "../support/gen.hpp"
#include "dflow/operalg.hpp"

using namespace dflow;

namespace {

Matrix random_gram(int d, std::uint64_t seed) {
  const Matrix B = random_matrix(d, seed);
  return B.adjoint() * B + Matrix::Identity(d, d);
}

Matrix diag(std::initializer_list<cplx> v) {
  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx x : v) A(i, i) = x, ++i;
  return A;
}

Matrix random_unitary(int d, std::uint64_t seed) { return expm(random_skew(d, seed)); }

}  // namespace

TEST_CASE("Gram model of Lebesgue measure is diagonal") {
  for (double c : {0.5, 1.0, 2.0}) {
    const GramModel gm = build_gram(CircleMeasure::lebesgue(c), 8);
    for (int n = 0; n <= 8; ++n)
      for (int m = 0; m <= 8; ++m) {
        const double expect = n == m ? 1.0 + c * n : 0.0;
        CHECK(std::abs(gm.gram(n, m) - expect) <= 1e-10);
      }
  }
  const GramModel zero = build_gram(CircleMeasure(), 5);
  CHECK((zero.gram - Matrix::Identity(6, 6)).norm() == 0.0);
  const GramModel atom = build_gram(CircleMeasure::dirac(kPi), 3);
  CHECK(atom.cross_check <= 1e-8);
  CHECK_THROWS_AS(build_gram(CircleMeasure::lebesgue(), 1), PreconditionError);
}

TEST_CASE("MatrixOperator validates its inner product") {
  CHECK_THROWS_AS(MatrixOperator(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), PreconditionError);
  CHECK_THROWS_AS(MatrixOperator(Matrix::Identity(2, 2), -Matrix::Identity(2, 2)), PreconditionError);
}

TEST_CASE("Gram adjoint") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = rng.integer(2, 7);
    const MatrixOperator T(random_matrix(d, 100 + trial), random_gram(d, 200 + trial));
    const Matrix Ts = T.adjoint();
    const Vector x = random_vector(d, 300 + trial), y = random_vector(d, 400 + trial);
    const cplx lhs = T.inner(T.op * x, y), rhs = T.inner(x, Ts * y);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("two_isometry_defect") {
  CHECK(two_isometry_defect(MatrixOperator(random_unitary(4, 5))).norm <= 1e-12);
  const GramModel gm = build_gram(CircleMeasure::dirac(kPi) + CircleMeasure::lebesgue(0.5), 12);
  CHECK(two_isometry_defect(gm.shift_operator(), 11).norm <= 1e-10);
  CHECK(eqnorm_defect_residual(gm) <= 1e-8);
  // The equivalent norm is not a 2-isometry metric: the defect is |p(0)|^2, not zero.
  const MatrixOperator Teq(gm.shift, eqnorm_gram(gm) + 1e-300 * Matrix::Identity(13, 13));
  CHECK(two_isometry_defect(Teq, 11).norm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("norm recursion") {
  gen::Rng rng(42);
  const MatrixOperator U(random_unitary(5, 6));
  for (int n = 1; n <= 6; ++n) CHECK(norm_recursion_residual(U, random_vector(5, n), n) <= 1e-12);

  const GramModel gm = build_gram(CircleMeasure::dirac(2.0), 12);
  const MatrixOperator T = gm.shift_operator();
  Vector e0 = Vector::Unit(13, 0);
  for (int n = 1; n <= 11; ++n) {
    Vector x = e0;
    for (int k = 0; k < n; ++k) x = T.op * x;
    CHECK(T.norm_sq(x) == doctest::Approx(1.0 + n).epsilon(1e-10));
    CHECK(norm_recursion_residual(T, e0, n) <= 1e-10);
  }

  for (int trial = 0; trial < 5; ++trial) {
    const GramModel g = build_gram(rng.atoms(3), 14);
    const MatrixOperator S = g.shift_operator();
    Vector x = Vector::Zero(15);
    for (int k = 0; k <= 2; ++k) x(k) = rng.complex();
    const double C = std::sqrt(std::max(S.norm_sq(x), S.norm_sq(S.op * x)));
    Vector y = x;
    for (int n = 1; n <= 11; ++n) {
      y = S.op * y;
      CHECK(norm_recursion_residual(S, x, n) <= 1e-9 * std::max(1.0, S.norm_sq(y)));
      CHECK(std::sqrt(S.norm_sq(y)) <= C * std::sqrt(n) + 1e-9);
    }
  }
}

TEST_CASE("powers of the shift grow at most like sqrt(n)") {
  const GramModel gm = build_gram(CircleMeasure::dirac(kPi) + CircleMeasure::dirac(1.0, 0.5), 64);
  const MatrixOperator T = gm.shift_operator();
  const double C = std::max(1.0, T.norm());
  Matrix P = Matrix::Identity(65, 65);
  for (int n = 1; n <= 64; ++n) {
    P = P * T.op;
    CHECK(T.with(P).norm() <= C * std::sqrt(n) * (1.0 + 1e-9));
  }
}

TEST_CASE("Cayley transforms") {
  CHECK(cayley_cogenerator(MatrixOperator(diag({-1.0}))).op.norm() == 0.0);
  for (double a : {-3.0, 0.5, 7.0}) CHECK(std::abs(cayley_cogenerator(MatrixOperator(diag({cplx(0, a)}))).op(0, 0)) == doctest::Approx(1.0));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MatrixOperator A(random_matrix(6, seed));
    const MatrixOperator back = cayley_generator(cayley_cogenerator(A));
    CHECK((back.op - A.op).norm() <= 1e-10 * A.op.norm());
  }
  CHECK_THROWS_AS(cayley_cogenerator(MatrixOperator(diag({1.0, 2.0}))), PreconditionError);
  CHECK_THROWS_AS(cayley_generator(MatrixOperator(diag({1.0}))), PreconditionError);
}

TEST_CASE("matrix exponential semigroup") {
  gen::Rng rng(43);
  const MatrixOperator A(random_matrix(5, 9));
  CHECK((semigroup_at(A, 0.0).op - Matrix::Identity(5, 5)).norm() == 0.0);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0, 2), s = rng.uniform(0, 2);
    const Matrix lhs = semigroup_at(A, t + s).op;
    CHECK((lhs - semigroup_at(A, t).op * semigroup_at(A, s).op).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
  }
  for (double t : {0.1, 1.0, 3.0}) CHECK(semigroup_at(MatrixOperator(diag({-1.0})), t).op(0, 0).real() == doctest::Approx(std::exp(-t)).epsilon(1e-14));
  CHECK_THROWS_AS(semigroup_at(A, -1.0), PreconditionError);
}

TEST_CASE("affine fit") {
  const std::vector<double> t{0, 1, 2, 3}, y{1, 3, 5, 7};
  const AffineFit f = fit_affine(t, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.residual <= 1e-14);
  const std::vector<double> q{0, 1, 4, 9};
  CHECK(fit_affine(t, q).residual > 0.5);
}

TEST_CASE("prop2_check examples") {
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0, 2.0};
  const std::vector<Vector> xs{random_vector(4, 1), random_vector(4, 2)};

  const Prop2Result skew = prop2_check(MatrixOperator(random_skew(4, 3)), xs, times);
  CHECK(skew.consistent);
  for (int k = 0; k < 4; ++k) CHECK(skew.holds[k]);
  CHECK(skew.residual[2] <= 1e-12);

  const Prop2Result neg = prop2_check(MatrixOperator(-Matrix::Identity(4, 4)), xs, times);
  CHECK(neg.consistent);
  for (int k = 0; k < 4; ++k) CHECK_FALSE(neg.holds[k]);

  const Prop2Result zero = prop2_check(MatrixOperator(Matrix::Zero(4, 4)), xs, times);
  CHECK(zero.consistent);
  for (int k = 0; k < 4; ++k) CHECK(zero.holds[k]);
}

TEST_CASE("the four conditions agree on seeded generators") {
  const Prop2Fuzz f = prop2_fuzz(50, 8, 0);
  CHECK(f.cases == 50);
  CHECK(f.agree == 50);
  CHECK(f.skew_max_residual <= 1e-11);
  for (std::size_t i = 0; i < f.results.size(); ++i)
    if (f.skew[i]) CHECK(f.results[i].holds[0]);

  // Skew-adjoint generators of 2-isometric (here unitary) semigroups have s(A) <= 0.
  for (std::uint64_t seed = 0; seed < 25; ++seed) CHECK(spectral_bound(MatrixOperator(random_skew(6, seed))) <= 1e-10);
}

TEST_CASE("semigroup probe") {
  const MatrixOperator A(random_skew(3, 4));
  const SemigroupProbe p = probe_semigroup(A, {random_vector(3, 1)}, {0.0, 0.5, 1.0, 2.0});
  REQUIRE(p.fits.size() == 1);
  CHECK(p.fits[0].residual >= 0.0);
  CHECK(std::abs(p.fits[0].slope) <= 1e-10);
  CHECK(p.spectral_bound <= p.growth_bound + 1e-8);
}

TEST_CASE("eigen lemma") {
  const std::vector<double> times{0.25, 0.5, 1.0, 2.0};
  const MatrixOperator A(diag({-1.0, cplx(0, 2)}));
  const Report r = eigen_lemma_check(A, times);
  CHECK(r.passed());
  CHECK(r.find("dim ker(A+I)")->value == 1.0);
  CHECK(r.find("||V x0||")->value <= 1e-12);
  CHECK(kernel_intersection_dim(A, times, true) == 1);
  CHECK(kernel_intersection_dim(MatrixOperator(diag({0.0, cplx(0, 1)})), times, true) == 0);
}

TEST_CASE("null space and rank") {
  Matrix M(2, 3);
  M << 1, 2, 3, 2, 4, 6;
  CHECK(numerical_rank(M) == 1);
  const Matrix K = null_space(M);
  CHECK(K.cols() == 2);
  CHECK((M * K).norm() <= 1e-12);
}

TEST_CASE("analyticity probe") {
  const auto u = analyticity_probe(MatrixOperator(random_unitary(4, 8)), 6);
  for (int d : u) CHECK(d == 4);

  const GramModel gm = build_gram(CircleMeasure::lebesgue(), 6);
  const auto s = analyticity_probe(gm.shift_operator(), 8);
  CHECK(s[6] == 0);
  for (std::size_t n = 1; n < s.size(); ++n) CHECK(s[n] <= s[n - 1]);

  Matrix B = Matrix::Zero(6, 6);
  B.topLeftCorner(2, 2) = random_unitary(2, 3);
  B.bottomRightCorner(4, 4) = build_gram(CircleMeasure(), 3).shift;
  const auto b = analyticity_probe(MatrixOperator(B), 8);
  CHECK(b.back() == 2);
}
