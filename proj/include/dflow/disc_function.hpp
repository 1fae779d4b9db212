#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dflow/core.hpp"

namespace dflow {

/// Node of an analytic-function expression tree on the unit disc.
///
/// Implementations supply exact values and first derivatives for |z| < 1 and
/// boundary values on the circle wherever those exist. Boundary points where
/// the function is not analytic are reported by `boundary_singularities` so
/// that quadratures can adapt their coordinates to them.
class DiscNode {
 public:
  virtual ~DiscNode() = default;
  virtual cplx value(cplx z) const = 0;
  virtual cplx derivative(cplx z) const = 0;
  /// Boundary value at e^{i theta}; empty at a singular point.
  virtual std::optional<cplx> boundary_value(double theta) const = 0;
  /// Angles in [0, 2pi) of non-analytic boundary points.
  virtual std::vector<double> boundary_singularities() const { return {}; }
  virtual std::string describe() const = 0;
};

/// Immutable handle to a disc function expression. Copies share the tree.
class DiscFunction {
 public:
  explicit DiscFunction(std::shared_ptr<const DiscNode> node);

  static DiscFunction constant(cplx c);
  static DiscFunction polynomial(std::vector<cplx> coeffs);
  static DiscFunction monomial(int n, cplx c = 1.0);
  /// exp(c (1+z)/(1-z)); requires Re c <= 0 so the function is bounded.
  static DiscFunction cayley_exp(cplx c);
  /// The singular inner function phi_t(z) = exp(-t (1+z)/(1-z)), t >= 0.
  static DiscFunction inner_exp(double t) { return cayley_exp(cplx(-t, 0.0)); }
  /// Disc automorphism m(z) = e^{i alpha} (z - a)/(1 - conj(a) z), |a| < 1.
  static DiscFunction automorphism(cplx a, double alpha = 0.0);

  cplx operator()(cplx z) const { return node_->value(z); }
  cplx value(cplx z) const { return node_->value(z); }
  cplx derivative(cplx z) const { return node_->derivative(z); }
  std::optional<cplx> boundary_value(double theta) const { return node_->boundary_value(theta); }
  std::vector<double> boundary_singularities() const { return node_->boundary_singularities(); }
  std::string describe() const { return node_->describe(); }

  /// Monomial coefficients when the expression is a polynomial.
  const std::vector<cplx>* polynomial_coeffs() const;
  /// c when the expression is exactly cayley_exp(c).
  std::optional<cplx> cayley_exp_parameter() const;

  /// f o m for a disc automorphism m(z) = e^{i alpha}(z - a)/(1 - conj(a) z).
  DiscFunction compose_automorphism(cplx a, double alpha = 0.0) const;

  const std::shared_ptr<const DiscNode>& node() const { return node_; }

  friend DiscFunction operator+(const DiscFunction& f, const DiscFunction& g);
  friend DiscFunction operator*(const DiscFunction& f, const DiscFunction& g);
  friend DiscFunction operator*(cplx c, const DiscFunction& f);

 private:
  std::shared_ptr<const DiscNode> node_;
};

/// Polynomial node, exposed so that callers can recognise polynomials.
class PolynomialNode final : public DiscNode {
 public:
  explicit PolynomialNode(std::vector<cplx> coeffs);
  cplx value(cplx z) const override;
  cplx derivative(cplx z) const override;
  std::optional<cplx> boundary_value(double theta) const override;
  std::string describe() const override;
  const std::vector<cplx>& coeffs() const { return coeffs_; }

 private:
  std::vector<cplx> coeffs_;
};

/// Polynomial product (coefficient convolution).
std::vector<cplx> poly_multiply(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace dflow
