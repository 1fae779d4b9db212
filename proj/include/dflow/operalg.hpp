#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dflow/core.hpp"
#include "dflow/discspace.hpp"
#include "dflow/measure.hpp"
#include "dflow/report.hpp"

namespace dflow {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator on C^d with the inner product <x, y> = y^H G x.
///
/// Every adjoint is taken in G. Note that a 2-isometry on a finite-dimensional
/// space with a definite inner product is unitary, so non-unitary examples come
/// from truncated Gram models, whose identities hold only on the low degrees.
struct MatrixOperator {
  Matrix op;
  Matrix gram;

  explicit MatrixOperator(Matrix t);
  /// Throws PreconditionError unless gram is Hermitian positive definite of matching size.
  MatrixOperator(Matrix t, Matrix g);

  Eigen::Index dim() const { return op.rows(); }
  /// T* = G^{-1} T^H G.
  Matrix adjoint() const;
  cplx inner(const Vector& x, const Vector& y) const { return y.dot(gram * x); }
  double norm_sq(const Vector& x) const { return inner(x, x).real(); }
  /// Operator norm in G: ||G^{1/2} T G^{-1/2}||_2.
  double norm() const;
  /// Same inner product, different matrix.
  MatrixOperator with(Matrix t) const { return {std::move(t), gram}; }
};

/// Truncated model of M_z on D(mu) in the monomial basis 1, z, ..., z^N.
struct GramModel {
  CircleMeasure measure;
  int degree = 0;
  Matrix gram;   ///< gram(m, n) = <z^n, z^m> in the Richter norm
  Matrix shift;  ///< z^n -> z^{n+1}, z^N -> 0
  double cross_check = 0.0;  ///< max |area - boundary| over the energy entries

  MatrixOperator shift_operator() const { return {shift, gram}; }
};

/// Gram matrix from area quadrature, cross-checked against the boundary form
/// sum over atoms of mass * D_xi(z^n, z^m) (plus a Gauss rule over the density).
GramModel build_gram(const CircleMeasure& mu, int N, const DiscQuadrature& q = {});

/// Energy entries only, by the boundary (local Dirichlet) route.
Matrix gram_energy_boundary(const CircleMeasure& mu, int N);

/// Inner-product matrix of |f(0)|^2 + energy: G - I + e0 e0^H.
Matrix eqnorm_gram(const GramModel& gm);

struct DefectResult {
  Matrix delta;  ///< T*^2 T^2 - 2 T* T + I (on the retained block)
  double norm = 0.0;
};

/// 2-isometry defect. With `leading` = r > 0 only the quadratic form on the
/// first r coordinates is kept (D = (T^2)^H G T^2 - 2 T^H G T + G restricted),
/// which is exact for a truncated shift when r <= N - 1.
DefectResult two_isometry_defect(const MatrixOperator& T, int leading = 0);

/// Largest |eigenvalue| of D - e0 e0^H on the leading N - 1 degrees, where D is
/// the 2-isometry defect form of M_z in the |f(0)|^2 + energy metric. Zero
/// means <Delta p, p> = |p(0)|^2 for every polynomial of degree <= N - 2.
double eqnorm_defect_residual(const GramModel& gm);

/// | ||T^n x||^2 - n ||T x||^2 + (n-1) ||x||^2 |.
double norm_recursion_residual(const MatrixOperator& T, const Vector& x, int n);

/// V = (A + I)(A - I)^{-1}; PreconditionError when A - I is singular.
MatrixOperator cayley_cogenerator(const MatrixOperator& A);
/// A = (V + I)(V - I)^{-1}; PreconditionError when V - I is singular.
MatrixOperator cayley_generator(const MatrixOperator& V);

/// Matrix exponential by scaling and squaring around a Taylor core.
Matrix expm(const Matrix& M);
/// e^{tA}, t >= 0.
MatrixOperator semigroup_at(const MatrixOperator& A, double t);

/// max Re lambda over the spectrum.
double spectral_bound(const MatrixOperator& A);

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< max |y_k - (slope t_k + intercept)|
};

AffineFit fit_affine(std::span<const double> t, std::span<const double> y);

struct SemigroupProbe {
  std::vector<double> times;
  std::vector<std::vector<double>> norms_sq;  ///< per vector, per time
  std::vector<AffineFit> fits;
  double spectral_bound = 0.0;
  double growth_bound = 0.0;  ///< min over t > 0 of log ||T(t)||_G / t
};

SemigroupProbe probe_semigroup(const MatrixOperator& A, const std::vector<Vector>& xs, std::vector<double> times);

struct Prop2Result {
  std::array<double, 4> residual{};  ///< conditions (i)-(iv), scaled
  std::array<bool, 4> holds{};
  bool consistent = false;
  Report report;
};

/// Conditions (i) e^{tA} are 2-isometries, (ii) t -> ||e^{tA}x||^2 affine,
/// (iii) Re<A^2 y, y> + ||Ay||^2 = 0, (iv) the cogenerator is a 2-isometry,
/// each judged at relative tolerance `tol`; `consistent` when all four agree.
Prop2Result prop2_check(const MatrixOperator& A, const std::vector<Vector>& vectors, std::vector<double> times,
                        double tol = 1e-9);

struct Prop2Fuzz {
  int cases = 0;
  int agree = 0;                   ///< cases whose four verdicts coincide
  double skew_max_residual = 0.0;  ///< worst residual over the skew-adjoint cases
  std::vector<bool> skew;
  std::vector<Prop2Result> results;
};

/// `count` seeded generators of dimension 2..max_dim, the first half
/// skew-adjoint and the rest generic, each run through prop2_check.
Prop2Fuzz prop2_fuzz(int count, int max_dim, std::uint64_t seed, double tol = 1e-9);

/// Orthonormal (Euclidean) basis of the numerical null space of M
/// (singular values <= 1e-8 * sigma_max).
Matrix null_space(const Matrix& M);

/// Numerical rank with threshold 1e-8 * sigma_max.
int numerical_rank(const Matrix& M);

/// dim of the intersection over the grid of ker(T(t) - e^{-t} I), T(t) = e^{tA}
/// (or e^{tA*} when `adjoint`).
int kernel_intersection_dim(const MatrixOperator& A, std::span<const double> times, bool adjoint = true);

/// ker(A + I) against the intersection of ker(e^{tA} - e^{-t} I), and V x0 = 0.
Report eigen_lemma_check(const MatrixOperator& A, std::span<const double> times);

/// Numerical rank of T^n for n = 1..n_max.
std::vector<int> analyticity_probe(const MatrixOperator& T, int n_max);

/// Seeded test matrices (deterministic for a given seed on any platform).
Matrix random_matrix(int d, std::uint64_t seed);
Matrix random_skew(int d, std::uint64_t seed);
Vector random_vector(int d, std::uint64_t seed);

}  // namespace dflow
