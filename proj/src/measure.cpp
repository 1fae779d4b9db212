#include "dflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dflow/quadrature.hpp"

namespace dflow {

namespace {

void validate_density(const DensityTable& d, const char* what) {
  if (d.grid.size() != d.values.size())
    throw PreconditionError(std::string(what) + ": grid and values differ in length");
  if (d.grid.size() == 1)
    throw PreconditionError(std::string(what) + ": density grid needs at least two nodes");
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    if (!std::isfinite(d.grid[i]) || !std::isfinite(d.values[i]))
      throw PreconditionError(std::string(what) + ": non-finite density entry");
    if (d.values[i] < 0.0) throw PreconditionError(std::string(what) + ": negative density value");
    if (i > 0 && !(d.grid[i] > d.grid[i - 1]))
      throw PreconditionError(std::string(what) + ": density grid must be strictly increasing");
  }
}

void validate_mass(double m, const char* what) {
  if (!std::isfinite(m) || m < 0.0) throw PreconditionError(std::string(what) + ": masses must be finite and >= 0");
}

double normalize_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Continuous antiderivative of the Poisson kernel P_r(u) = (1-r^2)/(1-2r cos u + r^2).
double poisson_antiderivative(double r, double u) {
  return u + 2.0 * std::atan2(r * std::sin(u), 1.0 - r * std::cos(u));
}

double poisson_kernel(double r, double u) {
  return (1.0 - r) * (1.0 + r) / (1.0 - 2.0 * r * std::cos(u) + r * r);
}

// Integral of u * P_r(u) over [a, b]; the integrand is bounded, with an O(1-r)
// wiggle at the kernel peaks u = 0, +-2pi, so the interval is split there.
double first_moment(double r, double a, double b) {
  std::vector<double> cuts{a};
  for (double p : {-kTwoPi, 0.0, kTwoPi})
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    s += adaptive_integrate([r](double u) { return u * poisson_kernel(r, u); }, cuts[i], cuts[i + 1], 1e-12);
  }
  return s;
}

DensityTable merge_densities(const DensityTable& a, const DensityTable& b) {
  DensityTable out;
  out.grid = a.grid;
  out.grid.insert(out.grid.end(), b.grid.begin(), b.grid.end());
  std::sort(out.grid.begin(), out.grid.end());
  out.grid.erase(std::unique(out.grid.begin(), out.grid.end()), out.grid.end());
  out.values.reserve(out.grid.size());
  for (double x : out.grid) out.values.push_back(a.at(x) + b.at(x));
  return out;
}

}  // namespace

double DensityTable::at(double x) const {
  if (grid.empty() || x < grid.front() || x > grid.back()) return 0.0;
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return values.back();
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return values[i - 1] + t * (values[i] - values[i - 1]);
}

double DensityTable::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    s += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
  return s;
}

CircleMeasure::CircleMeasure(std::vector<CircleAtom> atoms, std::optional<DensityTable> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  for (auto& a : atoms_) {
    validate_mass(a.mass, "CircleMeasure");
    if (!std::isfinite(a.theta)) throw PreconditionError("CircleMeasure: non-finite atom angle");
    a.theta = normalize_angle(a.theta);
  }
  if (density_) {
    if (density_->empty()) {
      density_.reset();
    } else {
      validate_density(*density_, "CircleMeasure");
      if (density_->grid.front() < 0.0 || density_->grid.back() > kTwoPi + 1e-14)
        throw PreconditionError("CircleMeasure: density grid must lie in [0, 2pi]");
    }
  }
}

CircleMeasure CircleMeasure::lebesgue(double c) {
  return CircleMeasure({}, DensityTable{{0.0, kTwoPi}, {c, c}});
}

CircleMeasure CircleMeasure::dirac(double theta, double mass) { return CircleMeasure({{theta, mass}}); }

CircleMeasure CircleMeasure::operator+(const CircleMeasure& other) const {
  std::vector<CircleAtom> atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  std::optional<DensityTable> d = density_;
  if (other.density_) d = d ? merge_densities(*d, *other.density_) : *other.density_;
  return CircleMeasure(std::move(atoms), std::move(d));
}

CircleMeasure CircleMeasure::scaled(double c) const {
  if (!(c >= 0.0)) throw PreconditionError("CircleMeasure::scaled: factor must be >= 0");
  auto atoms = atoms_;
  for (auto& a : atoms) a.mass *= c;
  auto d = density_;
  if (d)
    for (double& v : d->values) v *= c;
  return CircleMeasure(std::move(atoms), std::move(d));
}

LineMeasure::LineMeasure(std::vector<LineAtom> atoms, std::optional<DensityTable> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  for (const auto& a : atoms_) {
    validate_mass(a.mass, "LineMeasure");
    if (!std::isfinite(a.tau) || std::abs(a.tau) > kMaxTau)
      throw PreconditionError("LineMeasure: atom position must satisfy |tau| <= 1e6");
  }
  if (density_) {
    if (density_->empty()) {
      density_.reset();
    } else {
      validate_density(*density_, "LineMeasure");
      if (std::abs(density_->grid.front()) > kMaxTau || std::abs(density_->grid.back()) > kMaxTau)
        throw PreconditionError("LineMeasure: density grid must satisfy |tau| <= 1e6");
    }
  }
}

LineMeasure LineMeasure::dirac(double tau, double mass) { return LineMeasure({{tau, mass}}); }

void HalfPlaneWeightSpec::validate() const {
  if (!std::isfinite(rho) || rho < 0.0) throw PreconditionError("HalfPlaneWeightSpec: rho must be >= 0");
}

double total_mass(const CircleMeasure& m) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.mass;
  if (m.density()) s += m.density()->integral() / kTwoPi;
  return s;
}

double total_mass(const LineMeasure& m) {
  double s = 0.0;
  for (const auto& a : m.atoms()) s += a.mass;
  if (m.density()) s += m.density()->integral();
  return s;
}

double poisson_disc(const CircleMeasure& mu, cplx z) {
  const double r = std::abs(z);
  if (!(r < 1.0)) throw DomainError("poisson_disc: requires |z| < 1");
  const double one_minus = (1.0 - r) * (1.0 + r);
  double s = 0.0;
  for (const auto& a : mu.atoms()) {
    const cplx xi = std::polar(1.0, a.theta);
    s += a.mass * one_minus / std::norm(xi - z);
  }
  if (const auto& d = mu.density()) {
    const double phi = std::arg(z);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < d->grid.size(); ++k) {
      const double a = d->grid[k] - phi;
      const double b = d->grid[k + 1] - phi;
      const double dphi = poisson_antiderivative(r, b) - poisson_antiderivative(r, a);
      const double slope = (d->values[k + 1] - d->values[k]) / (d->grid[k + 1] - d->grid[k]);
      acc += d->values[k] * dphi;
      if (slope != 0.0) acc += slope * (-a * dphi + first_moment(r, a, b));
    }
    s += acc / kTwoPi;
  }
  return s;
}

double poisson_halfplane(const HalfPlaneWeightSpec& w, cplx s) {
  const double x = s.real();
  const double y = s.imag();
  if (!(x > 0.0)) throw DomainError("poisson_halfplane: requires Re s > 0");
  double acc = 0.0;
  for (const auto& a : w.nu.atoms()) acc += a.mass * x / (x * x + (y - a.tau) * (y - a.tau));
  if (const auto& d = w.nu.density()) {
    for (std::size_t k = 0; k + 1 < d->grid.size(); ++k) {
      const double a = d->grid[k];
      const double b = d->grid[k + 1];
      const double slope = (d->values[k + 1] - d->values[k]) / (b - a);
      // integral over [a,b] of (c + slope*(tau-a)) * x/(x^2+(y-tau)^2) d tau
      const double arc = std::atan((b - y) / x) - std::atan((a - y) / x);
      acc += d->values[k] * arc;
      if (slope != 0.0) {
        const double lg = 0.5 * x * std::log((x * x + (b - y) * (b - y)) / (x * x + (a - y) * (a - y)));
        acc += slope * ((y - a) * arc + lg);
      }
    }
  }
  return w.rho * x + acc / kPi;
}

double theta_to_tau(double theta) {
  const double h = 0.5 * theta;
  return std::cos(h) / std::sin(h);
}

double tau_to_theta(double tau) { return 2.0 * std::atan2(1.0, tau); }

HalfPlaneWeightSpec push_circle_to_line(const CircleMeasure& mu) {
  HalfPlaneWeightSpec out;
  out.rho = 0.0;
  std::vector<LineAtom> atoms;
  for (const auto& a : mu.atoms()) {
    if (a.theta == 0.0) {
      out.rho += a.mass;
      continue;
    }
    const double tau = theta_to_tau(a.theta);
    if (std::abs(tau) > LineMeasure::kMaxTau)
      throw PreconditionError("push_circle_to_line: atom too close to xi = 1 (|tau| > 1e6)");
    atoms.push_back({tau, kPi * (1.0 + tau * tau) * a.mass});
  }
  std::optional<DensityTable> dens;
  if (const auto& d = mu.density()) {
    if (d->grid.front() <= 0.0 || d->grid.back() >= kTwoPi)
      throw PreconditionError(
          "push_circle_to_line: density must be supported strictly inside (0, 2pi); "
          "its image on the line has infinite mass");
    DensityTable t;
    for (std::size_t k = d->grid.size(); k-- > 0;) {
      t.grid.push_back(theta_to_tau(d->grid[k]));
      t.values.push_back(d->values[k]);
    }
    dens = std::move(t);
  }
  out.nu = LineMeasure(std::move(atoms), std::move(dens));
  return out;
}

CircleMeasure pull_line_to_circle(const HalfPlaneWeightSpec& w) {
  w.validate();
  std::vector<CircleAtom> atoms;
  if (w.rho > 0.0) atoms.push_back({0.0, w.rho});
  for (const auto& a : w.nu.atoms())
    atoms.push_back({tau_to_theta(a.tau), a.mass / (kPi * (1.0 + a.tau * a.tau))});
  std::optional<DensityTable> dens;
  if (const auto& d = w.nu.density()) {
    DensityTable t;
    for (std::size_t k = d->grid.size(); k-- > 0;) {
      t.grid.push_back(tau_to_theta(d->grid[k]));
      t.values.push_back(d->values[k]);
    }
    dens = std::move(t);
  }
  return CircleMeasure(std::move(atoms), std::move(dens));
}

}  // namespace dflow
