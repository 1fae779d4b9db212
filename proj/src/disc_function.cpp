#include "dflow/disc_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dflow {

namespace {

std::string fmt_cplx(cplx c) {
  std::ostringstream os;
  os.precision(6);
  if (c.imag() == 0.0) {
    os << c.real();
  } else {
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  }
  return os.str();
}

double normalize_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

class CayleyExpNode final : public DiscNode {
 public:
  explicit CayleyExpNode(cplx c) : c_(c) {}
  cplx value(cplx z) const override { return std::exp(c_ * (1.0 + z) / (1.0 - z)); }
  cplx derivative(cplx z) const override {
    const cplx d = 1.0 - z;
    return value(z) * c_ * 2.0 / (d * d);
  }
  std::optional<cplx> boundary_value(double theta) const override {
    const double t = normalize_angle(theta);
    if (t == 0.0) return std::nullopt;
    const double h = 0.5 * t;
    // (1 + e^{it})/(1 - e^{it}) = i cot(t/2)
    return std::exp(c_ * cplx(0.0, std::cos(h) / std::sin(h)));
  }
  std::vector<double> boundary_singularities() const override {
    if (c_ == cplx(0.0)) return {};
    return {0.0};
  }
  std::string describe() const override { return "cayley_exp(" + fmt_cplx(c_) + ")"; }
  cplx parameter() const { return c_; }

 private:
  cplx c_;
};

class SumNode final : public DiscNode {
 public:
  SumNode(DiscFunction f, DiscFunction g) : f_(std::move(f)), g_(std::move(g)) {}
  cplx value(cplx z) const override { return f_(z) + g_(z); }
  cplx derivative(cplx z) const override { return f_.derivative(z) + g_.derivative(z); }
  std::optional<cplx> boundary_value(double theta) const override {
    auto a = f_.boundary_value(theta);
    auto b = g_.boundary_value(theta);
    if (!a || !b) return std::nullopt;
    return *a + *b;
  }
  std::vector<double> boundary_singularities() const override {
    auto s = f_.boundary_singularities();
    for (double t : g_.boundary_singularities())
      if (std::find(s.begin(), s.end(), t) == s.end()) s.push_back(t);
    return s;
  }
  std::string describe() const override { return "(" + f_.describe() + " + " + g_.describe() + ")"; }

 private:
  DiscFunction f_, g_;
};

class ProductNode final : public DiscNode {
 public:
  ProductNode(DiscFunction f, DiscFunction g) : f_(std::move(f)), g_(std::move(g)) {}
  cplx value(cplx z) const override { return f_(z) * g_(z); }
  cplx derivative(cplx z) const override { return f_.derivative(z) * g_(z) + f_(z) * g_.derivative(z); }
  std::optional<cplx> boundary_value(double theta) const override {
    auto a = f_.boundary_value(theta);
    auto b = g_.boundary_value(theta);
    if (!a || !b) return std::nullopt;
    return *a * *b;
  }
  std::vector<double> boundary_singularities() const override {
    auto s = f_.boundary_singularities();
    for (double t : g_.boundary_singularities())
      if (std::find(s.begin(), s.end(), t) == s.end()) s.push_back(t);
    return s;
  }
  std::string describe() const override { return f_.describe() + " * " + g_.describe(); }

 private:
  DiscFunction f_, g_;
};

class ScaleNode final : public DiscNode {
 public:
  ScaleNode(cplx c, DiscFunction f) : c_(c), f_(std::move(f)) {}
  cplx value(cplx z) const override { return c_ * f_(z); }
  cplx derivative(cplx z) const override { return c_ * f_.derivative(z); }
  std::optional<cplx> boundary_value(double theta) const override {
    auto a = f_.boundary_value(theta);
    if (!a) return std::nullopt;
    return c_ * *a;
  }
  std::vector<double> boundary_singularities() const override { return f_.boundary_singularities(); }
  std::string describe() const override { return fmt_cplx(c_) + " * " + f_.describe(); }

 private:
  cplx c_;
  DiscFunction f_;
};

// f(m(z)) with m(z) = e^{i alpha} (z - a)/(1 - conj(a) z).
class AutomorphismNode final : public DiscNode {
 public:
  AutomorphismNode(DiscFunction f, cplx a, double alpha)
      : f_(std::move(f)), a_(a), rot_(std::polar(1.0, alpha)) {}

  cplx map(cplx z) const { return rot_ * (z - a_) / (1.0 - std::conj(a_) * z); }
  cplx inverse(cplx w) const {
    const cplx u = w / rot_;
    return (u + a_) / (1.0 + std::conj(a_) * u);
  }

  cplx value(cplx z) const override { return f_(map(z)); }
  cplx derivative(cplx z) const override {
    const cplx d = 1.0 - std::conj(a_) * z;
    return f_.derivative(map(z)) * rot_ * (1.0 - std::norm(a_)) / (d * d);
  }
  std::optional<cplx> boundary_value(double theta) const override {
    return f_.boundary_value(std::arg(map(std::polar(1.0, theta))));
  }
  std::vector<double> boundary_singularities() const override {
    std::vector<double> out;
    for (double t : f_.boundary_singularities()) out.push_back(normalize_angle(std::arg(inverse(std::polar(1.0, t)))));
    return out;
  }
  std::string describe() const override {
    return f_.describe() + " o moebius(a=" + fmt_cplx(a_) + ", rot=" + fmt_cplx(rot_) + ")";
  }

 private:
  DiscFunction f_;
  cplx a_;
  cplx rot_;
};

}  // namespace

PolynomialNode::PolynomialNode(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

cplx PolynomialNode::value(cplx z) const {
  cplx acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * z + coeffs_[k];
  return acc;
}

cplx PolynomialNode::derivative(cplx z) const {
  cplx acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs_[k];
  return acc;
}

std::optional<cplx> PolynomialNode::boundary_value(double theta) const { return value(std::polar(1.0, theta)); }

std::string PolynomialNode::describe() const {
  std::string s = "poly[";
  for (std::size_t k = 0; k < coeffs_.size(); ++k) s += (k ? ", " : "") + fmt_cplx(coeffs_[k]);
  return s + "]";
}

std::vector<cplx> poly_multiply(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

DiscFunction::DiscFunction(std::shared_ptr<const DiscNode> node) : node_(std::move(node)) {
  if (!node_) throw PreconditionError("DiscFunction: null node");
}

DiscFunction DiscFunction::constant(cplx c) { return polynomial({c}); }

DiscFunction DiscFunction::polynomial(std::vector<cplx> coeffs) {
  return DiscFunction(std::make_shared<PolynomialNode>(std::move(coeffs)));
}

DiscFunction DiscFunction::monomial(int n, cplx c) {
  if (n < 0) throw PreconditionError("monomial: degree must be >= 0");
  std::vector<cplx> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
  coeffs.back() = c;
  return polynomial(std::move(coeffs));
}

DiscFunction DiscFunction::cayley_exp(cplx c) {
  if (c.real() > 0.0) throw PreconditionError("cayley_exp: requires Re c <= 0");
  return DiscFunction(std::make_shared<CayleyExpNode>(c));
}

DiscFunction DiscFunction::automorphism(cplx a, double alpha) {
  return monomial(1).compose_automorphism(a, alpha);
}

DiscFunction DiscFunction::compose_automorphism(cplx a, double alpha) const {
  if (!(std::abs(a) < 1.0)) throw PreconditionError("automorphism: requires |a| < 1");
  return DiscFunction(std::make_shared<AutomorphismNode>(*this, a, alpha));
}

const std::vector<cplx>* DiscFunction::polynomial_coeffs() const {
  if (auto p = dynamic_cast<const PolynomialNode*>(node_.get())) return &p->coeffs();
  return nullptr;
}

std::optional<cplx> DiscFunction::cayley_exp_parameter() const {
  if (auto p = dynamic_cast<const CayleyExpNode*>(node_.get())) return p->parameter();
  return std::nullopt;
}

DiscFunction operator+(const DiscFunction& f, const DiscFunction& g) {
  const auto* a = f.polynomial_coeffs();
  const auto* b = g.polynomial_coeffs();
  if (a && b) {
    std::vector<cplx> c(std::max(a->size(), b->size()), 0.0);
    for (std::size_t k = 0; k < a->size(); ++k) c[k] += (*a)[k];
    for (std::size_t k = 0; k < b->size(); ++k) c[k] += (*b)[k];
    return DiscFunction::polynomial(std::move(c));
  }
  return DiscFunction(std::make_shared<SumNode>(f, g));
}

DiscFunction operator*(const DiscFunction& f, const DiscFunction& g) {
  const auto* a = f.polynomial_coeffs();
  const auto* b = g.polynomial_coeffs();
  if (a && b) return DiscFunction::polynomial(poly_multiply(*a, *b));
  return DiscFunction(std::make_shared<ProductNode>(f, g));
}

DiscFunction operator*(cplx c, const DiscFunction& f) {
  if (const auto* a = f.polynomial_coeffs()) {
    auto coeffs = *a;
    for (auto& x : coeffs) x *= c;
    return DiscFunction::polynomial(std::move(coeffs));
  }
  return DiscFunction(std::make_shared<ScaleNode>(c, f));
}

}  // namespace dflow
