#pragma once

#include <span>
#include <vector>

#include "dflow/core.hpp"
#include "dflow/disc_function.hpp"
#include "dflow/measure.hpp"

namespace dflow {

/// Budget for area quadratures on the disc. Every energy is evaluated at three
/// refinement levels (node counts scaled by 1, 2, 4) and classified by
/// `classify_levels` with tolerance `tol`.
struct DiscQuadrature {
  int n_r = 32;          ///< radial Gauss-Legendre nodes (level 0)
  int n_theta = 64;      ///< angular nodes (level 0)
  double grading = 3.0;  ///< radial grading exponent: r = 1 - (1-u)^grading
  double tol = 1e-8;

  void validate() const;
};

/// Point of an area rule: sum of w * h(z) approximates (1/pi) * integral of h * P_mu dm.
struct WeightedNode {
  cplx z;
  double w;
};

/// Area rule for the Poisson weight of `mu`.
///
/// Atoms are integrated in coordinates adapted to the atom: polar coordinates
/// centred at the atom when the integrand has no boundary singularity (the
/// Poisson spike becomes the bounded factor 2cos(psi) - rho), and coordinates
/// sending the atom to 0 and the singular point to infinity otherwise. An atom
/// sitting on a singular point is integrated with an excised disc of radius
/// 10^-(level+1), so that divergent energies show up as growth across levels.
/// The density part uses a graded polar tensor rule.
std::vector<WeightedNode> energy_nodes(const CircleMeasure& mu, const DiscQuadrature& q,
                                       std::span<const double> singular_angles, int level);

/// H^2 norm squared: exact coefficient sum for polynomials, boundary quadrature otherwise.
Estimate h2_norm_sq(const DiscFunction& f);

/// Local Dirichlet integral at xi = e^{i theta}:
///   integral of |f(e^{it}) - f_at|^2 / |e^{it} - e^{i theta}|^2 dt/2pi,
/// by a midpoint rule centred on theta (the singular point is never sampled),
/// at n0, 2 n0, 4 n0 nodes.
Estimate local_dirichlet(const DiscFunction& f, double theta, cplx f_at, int n0 = 512);

/// Single midpoint evaluation of the local Dirichlet integral with n nodes.
double local_dirichlet_at(const DiscFunction& f, double theta, cplx f_at, int n);

/// Sesquilinear local Dirichlet form D_xi(f, g) with f_at = f(xi), g_at = g(xi).
cplx local_dirichlet_inner(const DiscFunction& f, const DiscFunction& g, double theta, int n = 1024);

/// (1/pi) * integral over the disc of |f'|^2 P_mu dm, by area quadrature.
Estimate dirichlet_energy(const DiscFunction& f, const CircleMeasure& mu, const DiscQuadrature& q = {});

/// The same energy through the boundary: sum of mass * D_xi(f) over atoms plus
/// the density integral of D_theta(f). Independent of the area rules.
Estimate boundary_energy(const DiscFunction& f, const CircleMeasure& mu, int n0 = 512);

/// ||f||_{H^2}^2 + dirichlet_energy.
Estimate richter_norm_sq(const DiscFunction& f, const CircleMeasure& mu, const DiscQuadrature& q = {});

/// |f(0)|^2 + dirichlet_energy.
Estimate eqnorm_sq(const DiscFunction& f, const CircleMeasure& mu, const DiscQuadrature& q = {});

}  // namespace dflow
