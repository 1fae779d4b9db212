#pragma once

#include <span>
#include <vector>

#include "dflow/disc_function.hpp"
#include "dflow/halfplane.hpp"
#include "dflow/measure.hpp"
#include "dflow/operalg.hpp"
#include "dflow/report.hpp"

namespace dflow {

/// mu_phi = |phi|^2 mu. Atom masses are multiplied by |phi(xi)|^2; a density
/// is refined (8 sub-intervals per segment) and multiplied at the new nodes.
/// PreconditionError when phi has no boundary value at an atom.
CircleMeasure boost_circle(const CircleMeasure& mu, const DiscFunction& phi);

/// nu_psi = |psi(i tau)|^2 nu, same conventions.
LineMeasure boost_line(const LineMeasure& nu, const HalfPlaneFunction& psi);

/// Boost of a full half-plane weight: rho is the mass at infinity and is
/// scaled by |psi(infinity)|^2 (PreconditionError if rho > 0 and psi has no
/// limit there).
HalfPlaneWeightSpec boost_weight(const HalfPlaneWeightSpec& w, const HalfPlaneFunction& psi);

/// Coefficient vectors (increasing degree, length N+1) of z^k g for every
/// generator g and k >= 0 with deg(z^k g) <= N, k >= `first`.
Matrix cyclic_span(std::span<const std::vector<cplx>> generators, int N, int first = 0);

struct WanderingResult {
  Matrix basis;  ///< G-orthonormal columns spanning M minus zM (coefficient vectors)
  int dim = 0;
};

/// M = span{z^k g} truncated to degree <= gm.degree; returns the orthogonal
/// complement of zM inside M in the Gram inner product (rank threshold 1e-8).
/// PreconditionError when M is empty.
WanderingResult wandering_vector(const GramModel& gm, std::span<const std::vector<cplx>> generators);

/// Principal angles (radians, decreasing) between the column spans of A and B
/// in the inner product y^H G x. min(rank A, rank B) angles are returned.
std::vector<double> principal_angles(const Matrix& A, const Matrix& B, const Matrix& G);

/// Compares M (truncated) with phi * P_{N - deg phi} for the wandering vector
/// phi, in the Gram metric of mu_phi = |phi|^2 mu. Passes when dim = 1 and the
/// largest principal angle is <= tol. Norm ratios ||phi z^j||_mu / ||z^j||_{mu_phi}
/// are recorded, not gated.
Report representation_check(const GramModel& gm, std::span<const std::vector<cplx>> generators, double tol = 1e-8);

/// representation_check at each truncation degree; records the angle per
/// degree and requires dim = 1 throughout and non-increasing angles.
Report representation_stability(const CircleMeasure& mu, std::span<const std::vector<cplx>> generators,
                                std::span<const int> degrees, const DiscQuadrature& q = {});

}  // namespace dflow
