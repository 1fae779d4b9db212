#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dflow/core.hpp"
#include "dflow/disc_function.hpp"
#include "dflow/discspace.hpp"
#include "dflow/measure.hpp"
#include "dflow/report.hpp"

namespace dflow {

/// Node of an analytic-function expression tree on the right half-plane.
class HalfPlaneNode {
 public:
  virtual ~HalfPlaneNode() = default;
  virtual cplx value(cplx s) const = 0;
  virtual cplx derivative(cplx s) const = 0;
  /// F(iy) where the boundary value exists.
  virtual std::optional<cplx> boundary_value(double y) const = 0;
  /// lim F(s) as s -> infinity when F is analytic there (z = 1 on the disc side).
  virtual std::optional<cplx> at_infinity() const = 0;
  /// Finite points y of the imaginary axis where F is not analytic.
  virtual std::vector<double> boundary_singularities() const { return {}; }
  virtual std::string describe() const = 0;
};

class HalfPlaneFunction {
 public:
  explicit HalfPlaneFunction(std::shared_ptr<const HalfPlaneNode> node);

  static HalfPlaneFunction constant(cplx c);
  /// p(s)/q(s), coefficients in increasing degree. q must not vanish on Re s >= 0.
  static HalfPlaneFunction rational(std::vector<cplx> p, std::vector<cplx> q);
  /// e^{-ts}, t >= 0.
  static HalfPlaneFunction exp_line(double t);
  /// e^{c s} with Re c <= 0.
  static HalfPlaneFunction exp_complex(cplx c);

  cplx operator()(cplx s) const { return node_->value(s); }
  cplx value(cplx s) const { return node_->value(s); }
  cplx derivative(cplx s) const { return node_->derivative(s); }
  std::optional<cplx> boundary_value(double y) const { return node_->boundary_value(y); }
  std::optional<cplx> at_infinity() const { return node_->at_infinity(); }
  bool regular_at_infinity() const { return at_infinity().has_value(); }
  std::vector<double> boundary_singularities() const { return node_->boundary_singularities(); }
  std::string describe() const { return node_->describe(); }

  const std::shared_ptr<const HalfPlaneNode>& node() const { return node_; }

  friend HalfPlaneFunction operator+(const HalfPlaneFunction& f, const HalfPlaneFunction& g);
  friend HalfPlaneFunction operator*(const HalfPlaneFunction& f, const HalfPlaneFunction& g);
  friend HalfPlaneFunction operator*(cplx c, const HalfPlaneFunction& f);

 private:
  std::shared_ptr<const HalfPlaneNode> node_;
};

/// f(z) = F((1+z)/(1-z)).
DiscFunction to_disc(const HalfPlaneFunction& F);
/// F(s) = f((s-1)/(s+1)).
HalfPlaneFunction to_halfplane(const DiscFunction& f);

enum class NormMethod { pullback, direct };

/// Knobs of the direct half-plane quadrature.
struct HalfPlaneQuadrature {
  int n_gauss = 16;  ///< Gauss nodes per panel (coarse pass; the fine pass doubles it)
  double tol = 1e-8;
};

/// |F(1)|^2 + (1/pi) * integral of |F'|^2 (rho x + Poisson integral of nu / pi) dx dy.
///
/// `pullback` evaluates |f(0)|^2 + dirichlet_energy(f, pull_line_to_circle(w)).
/// `direct` integrates on the half-plane. Divergence is decided on truncated
/// boxes [eps, L] x [-L, L] with (L, eps) = (20, 1e-3), (40, 1e-4), (80, 1e-4),
/// whose values are returned in `levels`; finite norms are then integrated over
/// the whole half-plane with mapped tails, at two node densities.
Estimate dtilde_norm_sq(const HalfPlaneFunction& F, const HalfPlaneWeightSpec& w,
                        NormMethod method = NormMethod::pullback, const DiscQuadrature& q = {},
                        const HalfPlaneQuadrature& hq = {});

/// The energy term alone (no |F(1)|^2), direct method.
Estimate dtilde_energy_direct(const HalfPlaneFunction& F, const HalfPlaneWeightSpec& w,
                              const HalfPlaneQuadrature& hq = {});

/// dtilde_norm_sq(to_halfplane(f), w, direct) against eqnorm_sq(f, pull_line_to_circle(w)).
Report transfer_check(const DiscFunction& f, const HalfPlaneWeightSpec& w, double tol = 1e-6,
                      const DiscQuadrature& q = {});

}  // namespace dflow
