#include <doctest.h>

#include <cmath>

#include "../support/gen.hpp"
#include "dflow/invariant.hpp"

using namespace dflow;

namespace {

bool same_atoms(const std::vector<CircleAtom>& a, const std::vector<CircleAtom>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i].theta - b[i].theta) > tol || std::abs(a[i].mass - b[i].mass) > tol * std::max(1.0, b[i].mass))
      return false;
  return true;
}

const std::vector<std::vector<cplx>> kZ{{0.0, 1.0}};
const std::vector<std::vector<cplx>> kOneZ{{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}};
const std::vector<std::vector<cplx>> kWhole{{1.0}};

}  // namespace

TEST_CASE("boost examples") {
  gen::Rng rng(61);
  const CircleMeasure mu = rng.atoms(4);
  CHECK(same_atoms(boost_circle(mu, DiscFunction::monomial(1)).atoms(), mu.atoms(), 1e-15));
  const CircleMeasure b = boost_circle(CircleMeasure::dirac(kPi), DiscFunction::polynomial({0.5, -0.5}));
  CHECK(b.atoms()[0].mass == doctest::Approx(1.0).epsilon(1e-15));

  const LineMeasure nu = rng.line_atoms(4);
  const LineMeasure nb = boost_line(nu, HalfPlaneFunction::rational({-1.0, 1.0}, {1.0, 1.0}));
  for (std::size_t i = 0; i < nu.atoms().size(); ++i) CHECK(nb.atoms()[i].mass == doctest::Approx(nu.atoms()[i].mass).epsilon(1e-14));

  const CircleMeasure dens = boost_circle(CircleMeasure::lebesgue(), DiscFunction::polynomial({1.0, 1.0}));
  // |1 + e^{i theta}|^2 averages to 2.
  CHECK(total_mass(dens) == doctest::Approx(2.0).epsilon(1e-2));

  CHECK_THROWS_AS(boost_circle(CircleMeasure::dirac(0.0), DiscFunction::inner_exp(1.0)), PreconditionError);
  HalfPlaneWeightSpec w;
  w.rho = 1.0;
  CHECK_THROWS_AS(boost_weight(w, HalfPlaneFunction::exp_line(1.0)), PreconditionError);
}

TEST_CASE("boosts are multiplicative") {
  gen::Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const CircleMeasure mu = rng.atoms(5);
    const DiscFunction p1 = DiscFunction::polynomial(rng.poly(3)), p2 = DiscFunction::polynomial(rng.poly(3));
    CHECK(same_atoms(boost_circle(boost_circle(mu, p1), p2).atoms(), boost_circle(mu, p1 * p2).atoms(), 1e-12));
  }
}

TEST_CASE("boosts commute with the transfer to the line") {
  gen::Rng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const CircleMeasure mu = rng.atoms(4, trial % 2 == 0);
    const DiscFunction phi = DiscFunction::polynomial(rng.poly(3));
    const HalfPlaneWeightSpec a = boost_weight(push_circle_to_line(mu), to_halfplane(phi));
    const HalfPlaneWeightSpec b = push_circle_to_line(boost_circle(mu, phi));
    CHECK(std::abs(a.rho - b.rho) <= 1e-10 * std::max(1.0, b.rho));
    REQUIRE(a.nu.atoms().size() == b.nu.atoms().size());
    for (std::size_t i = 0; i < a.nu.atoms().size(); ++i) {
      CHECK(std::abs(a.nu.atoms()[i].tau - b.nu.atoms()[i].tau) <= 1e-10 * std::max(1.0, std::abs(b.nu.atoms()[i].tau)));
      CHECK(std::abs(a.nu.atoms()[i].mass - b.nu.atoms()[i].mass) <= 1e-10 * std::max(1.0, b.nu.atoms()[i].mass));
    }
  }
}

TEST_CASE("cyclic span") {
  const Matrix B = cyclic_span(kZ, 4);
  CHECK(B.cols() == 4);
  CHECK(B(1, 0) == cplx(1.0));
  CHECK(cyclic_span(kZ, 4, 1).cols() == 3);
  CHECK_THROWS_AS(wandering_vector(build_gram(CircleMeasure::lebesgue(), 4), std::vector<std::vector<cplx>>{{0.0}}),
                  PreconditionError);
}

TEST_CASE("wandering vectors") {
  const WanderingResult z = wandering_vector(build_gram(CircleMeasure::lebesgue(), 8), kZ);
  CHECK(z.dim == 1);
  const Vector phi = z.basis.col(0);
  CHECK(std::norm(phi(1)) / phi.squaredNorm() >= 1.0 - 1e-6);

  const WanderingResult w = wandering_vector(build_gram(CircleMeasure::dirac(kPi), 8), kWhole);
  CHECK(w.dim == 1);
  CHECK(std::norm(w.basis(0, 0)) / w.basis.col(0).squaredNorm() >= 1.0 - 1e-12);

  for (int N : {8, 12, 16}) CHECK(wandering_vector(build_gram(CircleMeasure::dirac(kPi), N), kOneZ).dim == 1);
}

TEST_CASE("wandering subspaces of cyclic invariant subspaces are one-dimensional") {
  gen::Rng rng(64);
  for (int trial = 0; trial < 8; ++trial) {
    const CircleMeasure mu = trial % 2 ? rng.atoms(3) : rng.atoms(2) + CircleMeasure::lebesgue(rng.uniform(0.1, 1.0));
    const std::vector<std::vector<cplx>> gens{rng.poly(3)};
    for (int N : {8, 12, 16}) CHECK(wandering_vector(build_gram(mu, N), gens).dim == 1);
  }
}

TEST_CASE("principal angles") {
  const Matrix G = Matrix::Identity(3, 3);
  Matrix A = Matrix::Zero(3, 1), B = Matrix::Zero(3, 1);
  A(0, 0) = 1.0;
  B(0, 0) = 1.0;
  B(1, 0) = 1.0;
  const auto ang = principal_angles(A, B, G);
  REQUIRE(ang.size() == 1);
  CHECK(ang[0] == doctest::Approx(kPi / 4));
  CHECK(principal_angles(A, A, G)[0] <= 1e-15);
}

TEST_CASE("representation check") {
  const Report z = representation_check(build_gram(CircleMeasure::lebesgue(), 12), kZ);
  CHECK(z.passed());
  CHECK(z.find("max_principal_angle")->value <= 1e-8);
  CHECK(z.find("phi_re[1]")->value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));

  const Report w = representation_check(build_gram(CircleMeasure::dirac(kPi), 10), kWhole);
  CHECK(w.passed());
  CHECK(w.find("phi_degree")->value == 0.0);
  CHECK(w.find("max_principal_angle")->value <= 1e-12);

  const std::vector<int> Ns{8, 12, 16};
  const Report s = representation_stability(CircleMeasure::dirac(kPi), kOneZ, Ns);
  CHECK(s.passed());
  CHECK(s.find("angle[N=8]"));
  CHECK(s.find("angle[N=16]"));
  CHECK_FALSE(s.find("dims_all_one") == nullptr);
}
