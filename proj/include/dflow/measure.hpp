#pragma once

#include <optional>
#include <vector>

#include "dflow/core.hpp"

namespace dflow {

/// Piecewise-linear density given by its values on a strictly increasing grid.
/// The density vanishes outside [grid.front(), grid.back()].
struct DensityTable {
  std::vector<double> grid;
  std::vector<double> values;

  /// Linear interpolation; zero outside the grid.
  double at(double x) const;
  /// Exact integral of the interpolant against dx.
  double integral() const;
  bool empty() const { return grid.empty(); }
};

struct CircleAtom {
  double theta;  ///< radians, normalized to [0, 2*pi)
  double mass;
};

struct LineAtom {
  double tau;
  double mass;
};

/// Finite positive measure on the unit circle: atoms plus a piecewise-linear
/// density against normalized arc length d(theta)/2pi, grid inside [0, 2pi].
class CircleMeasure {
 public:
  CircleMeasure() = default;
  CircleMeasure(std::vector<CircleAtom> atoms, std::optional<DensityTable> density = std::nullopt);

  /// c * normalized Lebesgue measure.
  static CircleMeasure lebesgue(double c = 1.0);
  static CircleMeasure dirac(double theta, double mass = 1.0);

  const std::vector<CircleAtom>& atoms() const { return atoms_; }
  const std::optional<DensityTable>& density() const { return density_; }

  /// Sum of two measures (atoms concatenated; densities must not both be present
  /// unless they share a grid).
  CircleMeasure operator+(const CircleMeasure& other) const;
  CircleMeasure scaled(double c) const;

 private:
  std::vector<CircleAtom> atoms_;
  std::optional<DensityTable> density_;
};

/// Finite positive measure on the imaginary axis, parametrized by tau in iR.
/// Density is against d(tau).
class LineMeasure {
 public:
  /// Atoms with |tau| above this bound are rejected (ill-conditioned Cayley images).
  static constexpr double kMaxTau = 1e6;

  LineMeasure() = default;
  LineMeasure(std::vector<LineAtom> atoms, std::optional<DensityTable> density = std::nullopt);

  static LineMeasure dirac(double tau, double mass);

  const std::vector<LineAtom>& atoms() const { return atoms_; }
  const std::optional<DensityTable>& density() const { return density_; }

 private:
  std::vector<LineAtom> atoms_;
  std::optional<DensityTable> density_;
};

/// Weight rho*x + (1/pi) * Poisson integral of nu on the right half-plane.
struct HalfPlaneWeightSpec {
  double rho = 1.0;
  LineMeasure nu;

  void validate() const;
};

double total_mass(const CircleMeasure& m);
double total_mass(const LineMeasure& m);

/// Poisson integral of mu at |z| < 1: integral of (1-|z|^2)/|xi-z|^2 d mu(xi).
double poisson_disc(const CircleMeasure& mu, cplx z);

/// rho*x + (1/pi) * integral of x/(x^2+(y-tau)^2) d nu(tau), s = x+iy, Re s > 0.
double poisson_halfplane(const HalfPlaneWeightSpec& w, cplx s);

/// Boundary correspondence xi = (i tau - 1)/(i tau + 1), i.e. tau = cot(theta/2).
double theta_to_tau(double theta);
double tau_to_theta(double tau);

/// Transfers mu to the half-plane weight: the atom at xi = 1 becomes rho and
/// d nu(tau) = pi (1 + tau^2) d mu(xi) elsewhere. A density is resampled at
/// its grid nodes (values are preserved since d nu/d tau equals the circle
/// density); a density that does not vanish at xi = 1 has infinite line mass
/// and is rejected.
HalfPlaneWeightSpec push_circle_to_line(const CircleMeasure& mu);

/// Inverse of push_circle_to_line; rho becomes an atom at xi = 1.
CircleMeasure pull_line_to_circle(const HalfPlaneWeightSpec& w);

}  // namespace dflow
