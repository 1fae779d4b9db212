#include "dflow/discspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dflow/quadrature.hpp"

namespace dflow {

namespace {

constexpr int kLevels = 3;
constexpr double kSameAngle = 1e-12;

double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

// Singular point closest to theta, if any.
std::optional<double> nearest_singularity(std::span<const double> sing, double theta) {
  std::optional<double> best;
  double gap = std::numeric_limits<double>::infinity();
  for (double s : sing) {
    const double g = angle_gap(s, theta);
    if (g < gap) {
      gap = g;
      best = s;
    }
  }
  return best;
}

// Atom at xi with no nearby singularity. Polar coordinates about xi:
// z = xi (1 - rho e^{i psi}), rho = 2 v cos(psi). The Poisson kernel times the
// area element is (2cos psi - rho) d rho d psi = 4cos^2(psi)(1-v) dv d psi; the
// integrand is a trigonometric polynomial in 2psi for polynomial f, so the
// midpoint rule in psi is exact.
void add_atom_polar(std::vector<WeightedNode>& out, double theta, double mass, int n_v, int n_psi) {
  const cplx xi = std::polar(1.0, theta);
  const Rule1D v = gauss_legendre(n_v, 0.0, 1.0);
  const double h = kPi / n_psi;
  for (int j = 0; j < n_psi; ++j) {
    const double psi = -0.5 * kPi + (j + 0.5) * h;
    const double c = std::cos(psi);
    const cplx e = std::polar(1.0, psi);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double rho = 2.0 * v.x[i] * c;
      out.push_back({xi * (1.0 - rho * e), mass * 4.0 * c * c * (1.0 - v.x[i]) * v.w[i] * h / kPi});
    }
  }
}

// Atom at xi, integrand singular at zeta != xi. With z = zeta (s-1)/(s+1) the
// singular point goes to infinity and xi to i tau, tau = cot(theta'/2). Setting
// s = x + i(tau + x tan phi) turns the Poisson factor into (1 + tau^2) d phi.
// The phi panels come from slope_rule.
void add_atom_bipolar(std::vector<WeightedNode>& out, double theta, double zeta_angle, double mass, int n_panel) {
  const cplx zeta = std::polar(1.0, zeta_angle);
  const double tau = theta_to_tau(theta - zeta_angle);
  const Rule1D xr = half_line_rule(n_panel);
  const double pref = mass * (1.0 + tau * tau) / kPi;
  for (std::size_t i = 0; i < xr.size(); ++i) {
    const double x = xr.x[i];
    const Rule1D pr = slope_rule(x, tau, n_panel);
    for (std::size_t a = 0; a < pr.size(); ++a) {
      const cplx s(x, tau + x * std::tan(pr.x[a]));
      const double jac = 4.0 / std::norm((s + 1.0) * (s + 1.0));
      out.push_back({zeta * (s - 1.0) / (s + 1.0), pref * jac * xr.w[i] * pr.w[a]});
    }
  }
}

// Atom sitting on a singular point. In s = (1 + z/xi)/(1 - z/xi) the Poisson
// factor is Re s; the region |Im s| > Y (a neighbourhood of xi of size ~2/Y)
// is excised. Y grows tenfold per level.
void add_atom_excised(std::vector<WeightedNode>& out, double theta, double mass, int n_panel, int level) {
  const cplx xi = std::polar(1.0, theta);
  const double Y = 2.0 * std::pow(10.0, level + 1);
  std::vector<double> yb{0.0};
  for (double y = 0.25; y < Y; y *= 2.0) yb.push_back(y);
  yb.push_back(Y);
  const Rule1D xr = half_line_rule(n_panel);
  const Rule1D yr = paneled_rule(yb, n_panel);
  for (std::size_t a = 0; a < yr.size(); ++a) {
    for (double sign : {-1.0, 1.0}) {
      for (std::size_t b = 0; b < xr.size(); ++b) {
        const double x = xr.x[b];
        const cplx s(x, sign * yr.x[a]);
        const double jac = 4.0 / std::norm((s + 1.0) * (s + 1.0));
        out.push_back({xi * (s - 1.0) / (s + 1.0), mass * x * jac * xr.w[b] * yr.w[a] / kPi});
      }
    }
  }
}

// Graded polar tensor rule for the constant density c (Poisson integral c).
void add_density_polar(std::vector<WeightedNode>& out, double c, const DiscQuadrature& q, int n_r, int n_theta) {
  const Rule1D u = gauss_legendre(n_r, 0.0, 1.0);
  const double h = kTwoPi / n_theta;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double om = 1.0 - u.x[i];
    const double r = 1.0 - std::pow(om, q.grading);
    const double dr = q.grading * std::pow(om, q.grading - 1.0);
    for (int j = 0; j < n_theta; ++j) {
      out.push_back({std::polar(r, (j + 0.5) * h), c * r * dr * u.w[i] * h / kPi});
    }
  }
}

// n_r, n_theta: polar resolution; singular coordinates use n_theta/8 nodes per panel.
void add_atom(std::vector<WeightedNode>& out, double theta, double mass, std::span<const double> sing,
              int n_r, int n_theta, int level) {
  if (mass == 0.0) return;
  auto zeta = nearest_singularity(sing, theta);
  const int n_panel = std::max(4, n_theta / 8);
  if (!zeta) {
    add_atom_polar(out, theta, mass, n_r, n_theta);
  } else if (angle_gap(*zeta, theta) < kSameAngle) {
    add_atom_excised(out, theta, mass, n_panel, level);
  } else {
    add_atom_bipolar(out, theta, *zeta, mass, n_panel);
  }
}

// Constant over the whole circle: the Poisson integral is that constant.
bool rotation_invariant(const DensityTable& d) {
  if (d.grid.front() > 0.0 || d.grid.back() < kTwoPi) return false;
  for (std::size_t k = 0; k + 1 < d.values.size(); ++k)
    if (d.values[k] != d.values[k + 1]) return false;
  return true;
}

double energy_sum(const DiscFunction& f, const std::vector<WeightedNode>& nodes) {
  return block_sum(nodes.size(), [&](std::size_t i) { return nodes[i].w * std::norm(f.derivative(nodes[i].z)); });
}

Estimate from_levels(const std::array<double, 3>& v, double tol) {
  return {v[2], classify_levels(v, tol), v};
}

}  // namespace

void DiscQuadrature::validate() const {
  if (n_r < 4 || n_theta < 4) throw PreconditionError("DiscQuadrature: n_r and n_theta must be >= 4");
  if (!(grading >= 1.0)) throw PreconditionError("DiscQuadrature: grading must be >= 1");
  if (!(tol > 0.0)) throw PreconditionError("DiscQuadrature: tol must be > 0");
}

std::vector<WeightedNode> energy_nodes(const CircleMeasure& mu, const DiscQuadrature& q,
                                       std::span<const double> singular_angles, int level) {
  q.validate();
  const int scale = 1 << level;
  const int n_r = q.n_r * scale;
  const int n_theta = q.n_theta * scale;
  std::vector<WeightedNode> out;
  for (const auto& a : mu.atoms()) add_atom(out, a.theta, a.mass, singular_angles, n_r, n_theta, level);

  if (const auto& d = mu.density()) {
    if (singular_angles.empty() && rotation_invariant(*d)) {
      if (d->values.front() > 0.0) add_density_polar(out, d->values.front(), q, n_r, n_theta);
    } else {
      // Superpose atom rules over a Gauss rule in the boundary variable; the
      // density is refined, the per-atom rules stay at the base resolution.
      // Used for all but rotation-invariant densities, whose Poisson integral is
      // smooth up to the boundary, and always for singular integrands.
      const int n_s = 32 * scale;
      for (std::size_t k = 0; k + 1 < d->grid.size(); ++k) {
        const Rule1D g = gauss_legendre(n_s, d->grid[k], d->grid[k + 1]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double m = d->at(g.x[i]) * g.w[i] / kTwoPi;
          add_atom(out, g.x[i], m, singular_angles, q.n_r, q.n_theta, level);
        }
      }
    }
  }
  return out;
}

Estimate h2_norm_sq(const DiscFunction& f) {
  if (const auto* c = f.polynomial_coeffs()) {
    double s = 0.0;
    for (const auto& a : *c) s += std::norm(a);
    return Estimate::exact(s);
  }
  const auto sing = f.boundary_singularities();
  const double offset = sing.empty() ? 0.0 : sing.front();
  std::array<double, 3> v{};
  for (int k = 0; k < kLevels; ++k) {
    const std::size_t n = std::size_t{4096} << k;
    const double h = kTwoPi / static_cast<double>(n);
    v[k] = block_sum(n, [&](std::size_t j) {
             auto b = f.boundary_value(offset + (static_cast<double>(j) + 0.5) * h);
             return b ? std::norm(*b) : 0.0;
           }) /
           static_cast<double>(n);
  }
  return from_levels(v, 1e-8);
}

double local_dirichlet_at(const DiscFunction& f, double theta, cplx f_at, int n) {
  const double h = kTwoPi / n;
  return block_sum(static_cast<std::size_t>(n), [&](std::size_t j) {
           const double u = (static_cast<double>(j) + 0.5) * h;
           auto b = f.boundary_value(theta + u);
           if (!b) return 0.0;
           const double sn = std::sin(0.5 * u);
           return std::norm(*b - f_at) / (4.0 * sn * sn);
         }) /
         n;
}

Estimate local_dirichlet(const DiscFunction& f, double theta, cplx f_at, int n0) {
  if (n0 < 4) throw PreconditionError("local_dirichlet: n0 must be >= 4");
  std::array<double, 3> v{};
  for (int k = 0; k < kLevels; ++k) v[k] = local_dirichlet_at(f, theta, f_at, n0 << k);
  return from_levels(v, 1e-8);
}

cplx local_dirichlet_inner(const DiscFunction& f, const DiscFunction& g, double theta, int n) {
  const cplx fa = f.boundary_value(theta).value_or(0.0);
  const cplx ga = g.boundary_value(theta).value_or(0.0);
  const double h = kTwoPi / n;
  std::vector<cplx> terms(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double u = (j + 0.5) * h;
    auto a = f.boundary_value(theta + u);
    auto b = g.boundary_value(theta + u);
    if (!a || !b) continue;
    const double sn = std::sin(0.5 * u);
    terms[static_cast<std::size_t>(j)] = (*a - fa) * std::conj(*b - ga) / (4.0 * sn * sn);
  }
  std::vector<double> part(terms.size());
  std::transform(terms.begin(), terms.end(), part.begin(), [](cplx c) { return c.real(); });
  const double re = pairwise_sum(part);
  std::transform(terms.begin(), terms.end(), part.begin(), [](cplx c) { return c.imag(); });
  const double im = pairwise_sum(part);
  return cplx(re, im) / static_cast<double>(n);
}

Estimate dirichlet_energy(const DiscFunction& f, const CircleMeasure& mu, const DiscQuadrature& q) {
  q.validate();
  const auto sing = f.boundary_singularities();
  std::array<double, 3> v{};
  for (int k = 0; k < kLevels; ++k) v[k] = energy_sum(f, energy_nodes(mu, q, sing, k));
  return from_levels(v, q.tol);
}

Estimate boundary_energy(const DiscFunction& f, const CircleMeasure& mu, int n0) {
  Estimate total = Estimate::exact(0.0);
  for (const auto& a : mu.atoms()) {
    if (a.mass == 0.0) continue;
    const cplx at = f.boundary_value(a.theta).value_or(0.0);
    total = total + a.mass * local_dirichlet(f, a.theta, at, n0);
  }
  if (const auto& d = mu.density()) {
    std::array<double, 3> v{};
    for (int k = 0; k < kLevels; ++k) {
      double s = 0.0;
      for (std::size_t seg = 0; seg + 1 < d->grid.size(); ++seg) {
        const Rule1D g = gauss_legendre(32 << k, d->grid[seg], d->grid[seg + 1]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double m = d->at(g.x[i]) * g.w[i] / kTwoPi;
          if (m == 0.0) continue;
          const cplx at = f.boundary_value(g.x[i]).value_or(0.0);
          s += m * local_dirichlet_at(f, g.x[i], at, n0 << k);
        }
      }
      v[k] = s;
    }
    total = total + from_levels(v, 1e-8);
  }
  return total;
}

Estimate richter_norm_sq(const DiscFunction& f, const CircleMeasure& mu, const DiscQuadrature& q) {
  return h2_norm_sq(f) + dirichlet_energy(f, mu, q);
}

Estimate eqnorm_sq(const DiscFunction& f, const CircleMeasure& mu, const DiscQuadrature& q) {
  return Estimate::exact(std::norm(f(0.0))) + dirichlet_energy(f, mu, q);
}

}  // namespace dflow
