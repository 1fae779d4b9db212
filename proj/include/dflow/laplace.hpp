#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dflow/core.hpp"
#include "dflow/halfplane.hpp"
#include "dflow/measure.hpp"
#include "dflow/report.hpp"

namespace dflow {

/// coeff * t^k * e^{-a t}.
struct ExpPolyTerm {
  int k = 0;
  double a = 1.0;
  cplx coeff = 1.0;
};

/// Function on [0, inf) given as a finite sum of pieces, each either an
/// exponential polynomial or a piecewise-linear sample table with an
/// exponential tail, and each delayed by its own shift (zero on [0, shift]).
class TimeFunction {
 public:
  struct Piece {
    std::vector<ExpPolyTerm> terms;   ///< closed form when `grid` is empty
    std::vector<double> grid;         ///< samples: strictly increasing, grid[0] = 0
    std::vector<cplx> values;
    std::optional<double> tail_rate;  ///< f(t) = values.back() e^{-a (t - T)} beyond the grid
    double shift = 0.0;

    bool sampled() const { return !grid.empty(); }
  };

  TimeFunction() = default;

  static TimeFunction zero() { return {}; }
  /// Requires k >= 0 and a > 0 for every term.
  static TimeFunction exp_poly(std::vector<ExpPolyTerm> terms, double shift = 0.0);
  static TimeFunction exp(double a, cplx coeff = 1.0) { return exp_poly({{0, a, coeff}}); }
  /// Sample table; without a tail rate the function is only defined on the grid
  /// and transforms that need the tail throw PreconditionError.
  static TimeFunction samples(std::vector<double> grid, std::vector<cplx> values,
                              std::optional<double> tail_rate = std::nullopt);

  cplx operator()(double t) const;

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_zero() const { return pieces_.empty(); }
  bool closed_form() const;

  /// Points where some piece is not smooth (shifts and sample nodes).
  std::vector<double> breakpoints() const;
  /// Beyond this point every piece is below e^{-40} of its scale.
  double effective_end() const;

  friend TimeFunction operator+(const TimeFunction& f, const TimeFunction& g);
  friend TimeFunction operator*(cplx c, const TimeFunction& f);
  friend TimeFunction right_shift(const TimeFunction& f, double t);

 private:
  std::vector<Piece> pieces_;
};

/// (S_t f)(x) = 0 for x <= t, f(x - t) for x > t. Exact on every piece.
TimeFunction right_shift(const TimeFunction& f, double t);

/// Integral of e^{-st} f(t) dt, Re s > 0 (DomainError otherwise). Closed form
/// on exponential polynomials and on the linear segments of sample tables.
cplx laplace(const TimeFunction& f, cplx s);

/// The same integral by Gauss panels over [0, effective_end()], independent of
/// the closed forms (used as an oracle).
cplx laplace_quadrature(const TimeFunction& f, cplx s);

/// F = L f as a half-plane function. Exponential polynomials give rational
/// functions (times e^{-shift s}); sampled pieces give a transform node whose
/// derivative is -L[t f].
HalfPlaneFunction laplace_transform(const TimeFunction& f);

/// Integral of |G|^2 x^alpha dx dy over the right half-plane, alpha > -1.
/// Divergence is decided on the boxes used by dtilde_energy_direct; finite
/// values come from a full-domain rule at two node densities.
Estimate bergman_norm_sq(const HalfPlaneFunction& G, double alpha, const HalfPlaneQuadrature& hq = {});

/// (pi Gamma(1+alpha) / 2^alpha) * integral of |g|^2 t^{-1-alpha} dt, in t = e^u.
/// Levels truncate the integral at t = 1e-6, 1e-9, 1e-12.
Estimate timeside_norm_sq(const TimeFunction& g, double alpha);

/// Integral of |f|^2 dt.
double l2_norm_sq(const TimeFunction& f);

/// P(t_j) = integral over [0, t_j] of u f(u) e^{-i tau u} du for an increasing
/// grid, in one cumulative pass.
std::vector<cplx> prefix_transform(const TimeFunction& f, double tau, std::span<const double> grid);

/// Integral of |P_tau(t)|^2 dt / t^2.
Estimate prefix_energy(const TimeFunction& f, double tau);

/// (1/pi) int |F'|^2 x dx dy against (1/2) int |f|^2 dt.
Report item2_check(const TimeFunction& f, double tol = 1e-6);

/// (1/pi^2) int |F'|^2 x / (x^2 + (y - tau)^2) dx dy against
/// (1/2pi) int |P_tau(t)|^2 dt / t^2.
Report item3_check(const TimeFunction& f, double tau, double tol = 1e-5);

struct HNormSpec {
  HalfPlaneWeightSpec weight;
  bool include_eval = true;     ///< add |L f(1)|^2
  bool bare_constants = false;  ///< drop the 1/2 and 1/(2 pi) factors
};

/// include_eval |Lf(1)|^2 + rho c1 int |f|^2 + c2 int int |P_tau|^2 d nu(tau) dt / t^2
/// with c1 = 1/2, c2 = 1/(2 pi) (or 1, 1 with bare_constants). With the default
/// constants this equals dtilde_norm_sq(L f, weight).
Estimate h_norm_sq(const TimeFunction& f, const HNormSpec& spec);

/// h_norm_sq(S_t f) against dtilde_norm_sq(e^{-ts} L f) and L(S_t f) against
/// e^{-ts} L f at seeded points, for each t; the map t -> h_norm_sq(S_t f) is
/// fitted affinely and the fit recorded.
Report shift_correspondence_check(const TimeFunction& f, const HNormSpec& spec, std::span<const double> times,
                                  double tol = 1e-4, std::uint64_t seed = 0);

}  // namespace dflow
