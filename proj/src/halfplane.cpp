#include "dflow/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dflow/quadrature.hpp"

namespace dflow {

namespace {

cplx horner(const std::vector<cplx>& c, cplx s) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
  return acc;
}

std::vector<cplx> poly_derivative(const std::vector<cplx>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<cplx> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

std::vector<cplx> trimmed(std::vector<cplx> c, double rel = 0.0) {
  double scale = 0.0;
  for (auto x : c) scale = std::max(scale, std::abs(x));
  while (c.size() > 1 && std::abs(c.back()) <= rel * scale) c.pop_back();
  if (c.empty()) c.push_back(0.0);
  return c;
}

std::vector<cplx> poly_power(const std::vector<cplx>& base, int k) {
  std::vector<cplx> r{1.0};
  for (int i = 0; i < k; ++i) r = poly_multiply(r, base);
  return r;
}

void add_into(std::vector<cplx>& acc, const std::vector<cplx>& t, cplx c) {
  if (acc.size() < t.size()) acc.resize(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) acc[i] += c * t[i];
}

std::string fmt_poly(const std::vector<cplx>& c) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  for (std::size_t k = 0; k < c.size(); ++k) os << (k ? ", " : "") << c[k].real() << (c[k].imag() < 0 ? "-" : "+") << std::abs(c[k].imag()) << "i";
  os << "]";
  return os.str();
}

std::vector<double> merge_sing(std::vector<double> a, const std::vector<double>& b) {
  for (double t : b)
    if (std::find(a.begin(), a.end(), t) == a.end()) a.push_back(t);
  return a;
}

class RationalNode final : public HalfPlaneNode {
 public:
  RationalNode(std::vector<cplx> p, std::vector<cplx> q)
      : p_(trimmed(std::move(p))), q_(trimmed(std::move(q))), dp_(poly_derivative(p_)), dq_(poly_derivative(q_)) {}
  cplx value(cplx s) const override { return horner(p_, s) / horner(q_, s); }
  cplx derivative(cplx s) const override {
    const cplx qs = horner(q_, s);
    return (horner(dp_, s) * qs - horner(p_, s) * horner(dq_, s)) / (qs * qs);
  }
  std::optional<cplx> boundary_value(double y) const override { return value(cplx(0.0, y)); }
  std::optional<cplx> at_infinity() const override {
    if (p_.size() > q_.size()) return std::nullopt;
    if (p_.size() == q_.size()) return p_.back() / q_.back();
    return cplx(0.0);
  }
  std::string describe() const override { return "rational(" + fmt_poly(p_) + " / " + fmt_poly(q_) + ")"; }
  const std::vector<cplx>& p() const { return p_; }
  const std::vector<cplx>& q() const { return q_; }

 private:
  std::vector<cplx> p_, q_, dp_, dq_;
};

class ExpNode final : public HalfPlaneNode {
 public:
  explicit ExpNode(cplx c) : c_(c) {}
  cplx value(cplx s) const override { return std::exp(c_ * s); }
  cplx derivative(cplx s) const override { return c_ * std::exp(c_ * s); }
  std::optional<cplx> boundary_value(double y) const override { return std::exp(c_ * cplx(0.0, y)); }
  std::optional<cplx> at_infinity() const override {
    if (c_ == cplx(0.0)) return cplx(1.0);
    return std::nullopt;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "exp(" << c_.real() << (c_.imag() < 0 ? "-" : "+") << std::abs(c_.imag()) << "i * s)";
    return os.str();
  }
  cplx c() const { return c_; }

 private:
  cplx c_;
};

class HpSumNode final : public HalfPlaneNode {
 public:
  HpSumNode(HalfPlaneFunction f, HalfPlaneFunction g) : f_(std::move(f)), g_(std::move(g)) {}
  cplx value(cplx s) const override { return f_(s) + g_(s); }
  cplx derivative(cplx s) const override { return f_.derivative(s) + g_.derivative(s); }
  std::optional<cplx> boundary_value(double y) const override {
    auto a = f_.boundary_value(y);
    auto b = g_.boundary_value(y);
    if (!a || !b) return std::nullopt;
    return *a + *b;
  }
  std::optional<cplx> at_infinity() const override {
    auto a = f_.at_infinity();
    auto b = g_.at_infinity();
    if (!a || !b) return std::nullopt;
    return *a + *b;
  }
  std::vector<double> boundary_singularities() const override {
    return merge_sing(f_.boundary_singularities(), g_.boundary_singularities());
  }
  std::string describe() const override { return "(" + f_.describe() + " + " + g_.describe() + ")"; }

 private:
  HalfPlaneFunction f_, g_;
};

class HpProductNode final : public HalfPlaneNode {
 public:
  HpProductNode(HalfPlaneFunction f, HalfPlaneFunction g) : f_(std::move(f)), g_(std::move(g)) {}
  cplx value(cplx s) const override { return f_(s) * g_(s); }
  cplx derivative(cplx s) const override { return f_.derivative(s) * g_(s) + f_(s) * g_.derivative(s); }
  std::optional<cplx> boundary_value(double y) const override {
    auto a = f_.boundary_value(y);
    auto b = g_.boundary_value(y);
    if (!a || !b) return std::nullopt;
    return *a * *b;
  }
  std::optional<cplx> at_infinity() const override {
    auto a = f_.at_infinity();
    auto b = g_.at_infinity();
    if (!a || !b) return std::nullopt;
    return *a * *b;
  }
  std::vector<double> boundary_singularities() const override {
    return merge_sing(f_.boundary_singularities(), g_.boundary_singularities());
  }
  std::string describe() const override { return f_.describe() + " * " + g_.describe(); }

 private:
  HalfPlaneFunction f_, g_;
};

class HpScaleNode final : public HalfPlaneNode {
 public:
  HpScaleNode(cplx c, HalfPlaneFunction f) : c_(c), f_(std::move(f)) {}
  cplx value(cplx s) const override { return c_ * f_(s); }
  cplx derivative(cplx s) const override { return c_ * f_.derivative(s); }
  std::optional<cplx> boundary_value(double y) const override {
    auto a = f_.boundary_value(y);
    if (!a) return std::nullopt;
    return c_ * *a;
  }
  std::optional<cplx> at_infinity() const override {
    auto a = f_.at_infinity();
    if (!a) return std::nullopt;
    return c_ * *a;
  }
  std::vector<double> boundary_singularities() const override { return f_.boundary_singularities(); }
  std::string describe() const override { return "(" + std::to_string(c_.real()) + ") * " + f_.describe(); }

 private:
  cplx c_;
  HalfPlaneFunction f_;
};

// F(s) = f((s-1)/(s+1)).
class DiscPullbackNode final : public HalfPlaneNode {
 public:
  explicit DiscPullbackNode(DiscFunction f) : f_(std::move(f)) {}
  cplx value(cplx s) const override { return f_((s - 1.0) / (s + 1.0)); }
  cplx derivative(cplx s) const override {
    const cplx d = s + 1.0;
    return f_.derivative((s - 1.0) / d) * 2.0 / (d * d);
  }
  std::optional<cplx> boundary_value(double y) const override { return f_.boundary_value(tau_to_theta(y)); }
  std::optional<cplx> at_infinity() const override {
    for (double t : f_.boundary_singularities())
      if (t == 0.0) return std::nullopt;
    return f_.boundary_value(0.0);
  }
  std::vector<double> boundary_singularities() const override {
    std::vector<double> out;
    for (double t : f_.boundary_singularities())
      if (t != 0.0) out.push_back(theta_to_tau(t));
    return out;
  }
  std::string describe() const override { return f_.describe() + " o cayley^-1"; }
  const DiscFunction& disc() const { return f_; }

 private:
  DiscFunction f_;
};

// f(z) = F((1+z)/(1-z)).
class HalfPlaneCompositionNode final : public DiscNode {
 public:
  explicit HalfPlaneCompositionNode(HalfPlaneFunction F) : F_(std::move(F)) {}
  cplx value(cplx z) const override { return F_((1.0 + z) / (1.0 - z)); }
  cplx derivative(cplx z) const override {
    const cplx d = 1.0 - z;
    return F_.derivative((1.0 + z) / d) * 2.0 / (d * d);
  }
  std::optional<cplx> boundary_value(double theta) const override {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t == 0.0 || t >= kTwoPi) return F_.at_infinity();
    return F_.boundary_value(theta_to_tau(t));
  }
  std::vector<double> boundary_singularities() const override {
    std::vector<double> out;
    if (!F_.regular_at_infinity()) out.push_back(0.0);
    for (double y : F_.boundary_singularities()) out.push_back(tau_to_theta(y));
    return out;
  }
  std::string describe() const override { return F_.describe() + " o cayley"; }
  const HalfPlaneFunction& halfplane() const { return F_; }

 private:
  HalfPlaneFunction F_;
};

// ---- direct quadrature -------------------------------------------------

struct HpNode {
  cplx s;
  double w;
};

constexpr double kOuter = 64.0;

// Nodes s = x + i(tau + x tan phi) over x > 0, phi in (-pi/2, pi/2), with phi
// panels that are the images of dyadic panels in y. With `rho_term` the weight
// is (rho/pi) x dy dx = (rho/pi) x^2 sec^2(phi) d phi dx (tau = 0); otherwise it
// is the atom term (m/pi^2) x/(x^2+(y-tau)^2) dy dx = (m/pi^2) d phi dx.
void add_phi_nodes(std::vector<HpNode>& out, double tau, double coeff, bool rho_term, const Rule1D& xr, int n) {
  for (std::size_t i = 0; i < xr.size(); ++i) {
    const double x = xr.x[i];
    const Rule1D pr = slope_rule(x, tau, n);
    for (std::size_t k = 0; k < pr.size(); ++k) {
      const double t = std::tan(pr.x[k]);
      double w = coeff * xr.w[i] * pr.w[k];
      w *= rho_term ? x * x * (1.0 + t * t) / kPi : 1.0 / (kPi * kPi);
      out.push_back({cplx(x, tau + x * t), w});
    }
  }
}

std::vector<HpNode> full_nodes(const HalfPlaneWeightSpec& w, int n) {
  std::vector<HpNode> out;
  const Rule1D xr = half_line_rule(n);
  if (w.rho > 0.0) add_phi_nodes(out, 0.0, w.rho, true, xr, n);
  for (const auto& a : w.nu.atoms())
    if (a.mass > 0.0) add_phi_nodes(out, a.tau, a.mass, false, xr, n);
  if (const auto& d = w.nu.density()) {
    for (std::size_t k = 0; k + 1 < d->grid.size(); ++k) {
      const Rule1D g = gauss_legendre(n, d->grid[k], d->grid[k + 1]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = d->at(g.x[i]) * g.w[i];
        if (m > 0.0) add_phi_nodes(out, g.x[i], m, false, xr, n);
      }
    }
  }
  return out;
}

// Truncated box [eps, L] x [-L, L] with the closed-form weight.
std::vector<HpNode> box_nodes(const HalfPlaneWeightSpec& w, double L, double eps, int n) {
  std::vector<double> xb{eps};
  for (double x = 4.0 * eps; x < L; x *= 4.0) xb.push_back(x);
  xb.push_back(L);

  std::vector<double> yb;
  for (double b : dyadic_breaks(0.0, L))
    if (std::abs(b) < L) yb.push_back(b);
  yb.push_back(-L);
  yb.push_back(L);
  for (const auto& a : w.nu.atoms())
    for (double d = eps; d < 1.0; d *= 4.0)
      for (double b : {a.tau - d, a.tau + d})
        if (std::abs(b) < L) yb.push_back(b);
  if (const auto& d = w.nu.density())
    for (double b : d->grid)
      if (std::abs(b) < L) yb.push_back(b);
  std::sort(yb.begin(), yb.end());
  yb.erase(std::unique(yb.begin(), yb.end()), yb.end());

  const Rule1D xr = paneled_rule(xb, n);
  const Rule1D yr = paneled_rule(yb, n);
  std::vector<HpNode> out;
  out.reserve(xr.size() * yr.size());
  for (std::size_t i = 0; i < xr.size(); ++i)
    for (std::size_t j = 0; j < yr.size(); ++j) {
      const cplx s(xr.x[i], yr.x[j]);
      out.push_back({s, poisson_halfplane(w, s) * xr.w[i] * yr.w[j] / kPi});
    }
  return out;
}

double hp_sum(const HalfPlaneFunction& F, const std::vector<HpNode>& nodes) {
  return block_sum(nodes.size(), [&](std::size_t i) { return nodes[i].w * std::norm(F.derivative(nodes[i].s)); });
}

}  // namespace

HalfPlaneFunction::HalfPlaneFunction(std::shared_ptr<const HalfPlaneNode> node) : node_(std::move(node)) {
  if (!node_) throw PreconditionError("HalfPlaneFunction: null node");
}

HalfPlaneFunction HalfPlaneFunction::constant(cplx c) { return rational({c}, {1.0}); }

HalfPlaneFunction HalfPlaneFunction::rational(std::vector<cplx> p, std::vector<cplx> q) {
  if (p.empty()) p.push_back(0.0);
  q = trimmed(std::move(q));
  if (q.size() == 1 && q[0] == cplx(0.0)) throw PreconditionError("rational: zero denominator");
  const Eigen::Index deg = static_cast<Eigen::Index>(q.size()) - 1;
  if (deg > 0) {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
    for (Eigen::Index i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < deg; ++i) C(i, deg - 1) = -q[static_cast<std::size_t>(i)] / q.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    for (Eigen::Index i = 0; i < deg; ++i)
      if (es.eigenvalues()[i].real() > -1e-12)
        throw PreconditionError("rational: denominator vanishes in the closed right half-plane");
  }
  return HalfPlaneFunction(std::make_shared<RationalNode>(std::move(p), std::move(q)));
}

HalfPlaneFunction HalfPlaneFunction::exp_line(double t) {
  if (!(t >= 0.0)) throw PreconditionError("exp_line: requires t >= 0");
  return HalfPlaneFunction(std::make_shared<ExpNode>(cplx(-t, 0.0)));
}

HalfPlaneFunction HalfPlaneFunction::exp_complex(cplx c) {
  if (c.real() > 0.0) throw PreconditionError("exp_complex: requires Re c <= 0");
  return HalfPlaneFunction(std::make_shared<ExpNode>(c));
}

HalfPlaneFunction operator+(const HalfPlaneFunction& f, const HalfPlaneFunction& g) {
  return HalfPlaneFunction(std::make_shared<HpSumNode>(f, g));
}

HalfPlaneFunction operator*(const HalfPlaneFunction& f, const HalfPlaneFunction& g) {
  auto* a = dynamic_cast<const RationalNode*>(f.node().get());
  auto* b = dynamic_cast<const RationalNode*>(g.node().get());
  if (a && b)
    return HalfPlaneFunction(
        std::make_shared<RationalNode>(poly_multiply(a->p(), b->p()), poly_multiply(a->q(), b->q())));
  return HalfPlaneFunction(std::make_shared<HpProductNode>(f, g));
}

HalfPlaneFunction operator*(cplx c, const HalfPlaneFunction& f) {
  if (auto* a = dynamic_cast<const RationalNode*>(f.node().get())) {
    auto p = a->p();
    for (auto& x : p) x *= c;
    return HalfPlaneFunction(std::make_shared<RationalNode>(std::move(p), a->q()));
  }
  return HalfPlaneFunction(std::make_shared<HpScaleNode>(c, f));
}

DiscFunction to_disc(const HalfPlaneFunction& F) {
  const auto* node = F.node().get();
  if (auto* p = dynamic_cast<const DiscPullbackNode*>(node)) return p->disc();
  if (auto* e = dynamic_cast<const ExpNode*>(node)) return DiscFunction::cayley_exp(e->c());
  if (auto* r = dynamic_cast<const RationalNode*>(node)) {
    // p(s)/q(s) with s = (1+z)/(1-z): multiply through by (1-z)^d.
    const int d = static_cast<int>(std::max(r->p().size(), r->q().size())) - 1;
    auto lift = [d](const std::vector<cplx>& c) {
      std::vector<cplx> acc{0.0};
      for (std::size_t k = 0; k < c.size(); ++k)
        add_into(acc, poly_multiply(poly_power({1.0, 1.0}, static_cast<int>(k)), poly_power({1.0, -1.0}, d - static_cast<int>(k))), c[k]);
      return acc;
    };
    const auto P = lift(r->p());
    const auto Q = trimmed(lift(r->q()), 1e-14);
    if (Q.size() == 1) {
      auto coeffs = trimmed(P, 0.0);
      for (auto& c : coeffs) c /= Q[0];
      return DiscFunction::polynomial(std::move(coeffs));
    }
  }
  return DiscFunction(std::make_shared<HalfPlaneCompositionNode>(F));
}

HalfPlaneFunction to_halfplane(const DiscFunction& f) {
  const auto* node = f.node().get();
  if (auto* c = dynamic_cast<const HalfPlaneCompositionNode*>(node)) return c->halfplane();
  if (auto c = f.cayley_exp_parameter()) return HalfPlaneFunction(std::make_shared<ExpNode>(*c));
  if (const auto* a = f.polynomial_coeffs()) {
    // sum a_k (s-1)^k (s+1)^(n-k) / (s+1)^n
    const int n = static_cast<int>(a->size()) - 1;
    std::vector<cplx> p{0.0};
    for (int k = 0; k <= n; ++k)
      add_into(p, poly_multiply(poly_power({-1.0, 1.0}, k), poly_power({1.0, 1.0}, n - k)), (*a)[static_cast<std::size_t>(k)]);
    return HalfPlaneFunction(std::make_shared<RationalNode>(std::move(p), poly_power({1.0, 1.0}, n)));
  }
  return HalfPlaneFunction(std::make_shared<DiscPullbackNode>(f));
}

Estimate dtilde_energy_direct(const HalfPlaneFunction& F, const HalfPlaneWeightSpec& w, const HalfPlaneQuadrature& hq) {
  w.validate();
  if (hq.n_gauss < 4) throw PreconditionError("HalfPlaneQuadrature: n_gauss must be >= 4");
  static constexpr std::array<std::pair<double, double>, 3> kSchedule{{{20.0, 1e-3}, {40.0, 1e-4}, {80.0, 1e-4}}};
  std::array<double, 3> box{};
  for (std::size_t k = 0; k < kSchedule.size(); ++k)
    box[k] = hp_sum(F, box_nodes(w, kSchedule[k].first, kSchedule[k].second, hq.n_gauss));
  if (classify_levels(box, hq.tol) == Convergence::divergent) return {box[2], Convergence::divergent, box};

  const double coarse = hp_sum(F, full_nodes(w, hq.n_gauss));
  const double fine = hp_sum(F, full_nodes(w, 2 * hq.n_gauss));
  const bool ok = std::abs(fine - coarse) <= hq.tol * std::max(1.0, std::abs(fine));
  return {fine, ok ? Convergence::converged : Convergence::unconverged, box};
}

Estimate dtilde_norm_sq(const HalfPlaneFunction& F, const HalfPlaneWeightSpec& w, NormMethod method,
                        const DiscQuadrature& q, const HalfPlaneQuadrature& hq) {
  w.validate();
  const double at1 = std::norm(F(1.0));
  if (method == NormMethod::pullback) {
    return Estimate::exact(at1) + dirichlet_energy(to_disc(F), pull_line_to_circle(w), q);
  }
  return Estimate::exact(at1) + dtilde_energy_direct(F, w, hq);
}

Report transfer_check(const DiscFunction& f, const HalfPlaneWeightSpec& w, double tol, const DiscQuadrature& q) {
  Report r;
  r.title = "transfer_check";
  const Estimate direct = dtilde_norm_sq(to_halfplane(f), w, NormMethod::direct, q);
  const Estimate disc = eqnorm_sq(f, pull_line_to_circle(w), q);
  r.record("halfplane_direct", direct.value, to_string(direct.status));
  r.record("disc_eqnorm", disc.value, to_string(disc.status));
  if (direct.divergent() || disc.divergent()) {
    r.divergent("transfer", direct.value, "norm is infinite on at least one side");
    return r;
  }
  r.compare("transfer", direct.value, disc.value, tol, true);
  r.compare("evaluation_term", std::norm(to_halfplane(f)(1.0)), std::norm(f(0.0)), 1e-14);
  return r;
}

}  // namespace dflow
