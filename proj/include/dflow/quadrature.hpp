#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dflow {

/// Nodes and weights of a one-dimensional rule.
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1]. Results are cached per n.
const Rule1D& gauss_legendre(int n);

/// Gauss-Legendre rule mapped affinely onto [a, b].
Rule1D gauss_legendre(int n, double a, double b);

/// Concatenation of n-point Gauss rules on consecutive intervals [b_k, b_{k+1}].
Rule1D paneled_rule(std::span<const double> breaks, int n);

/// center and center +- 2^k / 4 for 2^k / 4 <= outer, sorted.
std::vector<double> dyadic_breaks(double center, double outer);

/// Rule on [0, inf): panels 0, 1/64, 1/16, ..., 64 and the tail x = 64/(1-v).
Rule1D half_line_rule(int n);

/// Rule on the real line: dyadic panels about `center` out to distance 64,
/// mapped tails beyond.
Rule1D real_line_rule(double center, int n);

/// Rule in phi on (-pi/2, pi/2) for the substitution y = tau + x tan(phi),
/// x > 0: panels are the images of dyadic panels in y (about 0, out to 64) and
/// of y - tau = +-x 2^j below 1/4, so both scales of the map are resolved.
Rule1D slope_rule(double x, double tau, int n);

/// Pairwise (cascade) summation; the result depends only on the order of `v`.
double pairwise_sum(std::span<const double> v);

/// Sum of f(i) for i in [0, n). The index range is cut into fixed blocks that
/// are summed pairwise, so the result is bit-identical for any thread count.
double block_sum(std::size_t n, const std::function<double(std::size_t)>& f);

/// Worker threads used by block_sum (default 1). Thread-safe.
void set_quadrature_threads(unsigned n);
unsigned quadrature_threads();

/// Adaptive Gauss-Kronrod on [a, b] (relative tolerance `tol`).
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-13);

}  // namespace dflow
