#include "dflow/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "dflow/invariant.hpp"
#include "dflow/laplace.hpp"
#include "dflow/operalg.hpp"

namespace dflow {

namespace {

// ---- input helpers ------------------------------------------------------

const Json& in(const Json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError({path + "/" + key + ": missing"});
  return *it;
}

std::string sub(const std::string& path, const char* key) { return path + "/" + key; }

bool bool_or(const Json& j, const char* key, const std::string& path, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean()) throw SchemaError({sub(path, key) + ": expected true or false"});
  return j[key].get<bool>();
}

int positive_int(const Json& j, const char* key, const std::string& path, int min) {
  const int v = parse_int(in(j, key, path), sub(path, key));
  if (v < min) throw SchemaError({sub(path, key) + ": must be >= " + std::to_string(min)});
  return v;
}

CheckOutcome from_estimate(const Estimate& e) {
  CheckOutcome o;
  o.value = e.value;
  o.status = e.status;
  return o;
}

// Report-backed outcome: `primary` names the item whose value/reference is
// reported; without one, the value is the number of failing gated items.
CheckOutcome from_report(Report r, const char* primary = nullptr) {
  CheckOutcome o;
  for (const auto& it : r.items)
    if (it.verdict == Verdict::divergent) o.status = Convergence::divergent;
  const ReportItem* p = primary ? r.find(primary) : nullptr;
  if (p) {
    o.value = p->value;
    o.reference = p->reference;
    o.provenance = "second route";
  } else {
    int bad = 0;
    for (const auto& it : r.items)
      if (it.gated && it.verdict != Verdict::pass) ++bad;
    o.value = bad;
    o.reference = 0.0;
    o.provenance = "failing report items";
  }
  o.detail = std::move(r);
  return o;
}

// ---- registry -----------------------------------------------------------

std::vector<OperationInfo> make_catalog() {
  std::vector<OperationInfo> ops;

  ops.push_back({"monomial_law", "dirichlet_energy(z^n, mu) against n mu(T); boundary route in the detail",
                 {"measure", "n"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const int n = positive_int(j, "n", p, 0);
                   return [mu, n](const RunContext& ctx) {
                     const DiscFunction f = DiscFunction::monomial(n);
                     CheckOutcome o = from_estimate(dirichlet_energy(f, mu, ctx.disc));
                     o.reference = n * total_mass(mu);
                     o.provenance = "n * mu(T)";
                     o.detail.title = "monomial_law";
                     o.detail.compare("boundary_path", boundary_energy(f, mu).value, *o.reference, 1e-10, true);
                     return o;
                   };
                 }});

  ops.push_back({"dirichlet_energy", "(1/pi) integral of |f'|^2 P_mu over the disc", {"function", "measure"},
                 {"method"}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const DiscFunction f = parse_disc_function(in(j, "function", p), sub(p, "function"));
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const std::string m = j.value("method", std::string("area"));
                   if (m != "area" && m != "boundary") throw SchemaError({sub(p, "method") + ": expected area or boundary"});
                   return [f, mu, m](const RunContext& ctx) {
                     return from_estimate(m == "area" ? dirichlet_energy(f, mu, ctx.disc) : boundary_energy(f, mu));
                   };
                 }});

  ops.push_back({"richter_norm_sq", "||f||_{H^2}^2 + D_mu(f)", {"function", "measure"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const DiscFunction f = parse_disc_function(in(j, "function", p), sub(p, "function"));
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   return [f, mu](const RunContext& ctx) { return from_estimate(richter_norm_sq(f, mu, ctx.disc)); };
                 }});

  ops.push_back({"eqnorm_sq", "|f(0)|^2 + D_mu(f)", {"function", "measure"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const DiscFunction f = parse_disc_function(in(j, "function", p), sub(p, "function"));
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   return [f, mu](const RunContext& ctx) { return from_estimate(eqnorm_sq(f, mu, ctx.disc)); };
                 }});

  ops.push_back({"semigroup_affine", "least-squares affine fit of t -> ||phi_t||^2 (Richter norm)", {"measure", "times"},
                 {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const auto ts = parse_reals(in(j, "times", p), sub(p, "times"));
                   if (ts.size() < 2) throw SchemaError({sub(p, "times") + ": need at least two times"});
                   return [mu, ts](const RunContext& ctx) {
                     CheckOutcome o;
                     o.detail.title = "semigroup_affine";
                     std::vector<double> ns;
                     for (double t : ts) {
                       const Estimate e = richter_norm_sq(DiscFunction::inner_exp(t), mu, ctx.disc);
                       if (e.divergent()) o.status = Convergence::divergent;
                       ns.push_back(e.value);
                       std::ostringstream name;
                       name << "norm_sq[t=" << t << "]";
                       o.detail.record(name.str(), e.value, to_string(e.status));
                     }
                     const AffineFit fit = fit_affine(ts, ns);
                     o.detail.record("slope", fit.slope);
                     o.detail.record("intercept", fit.intercept);
                     o.value = fit.residual;
                     o.reference = 0.0;
                     o.provenance = "affine in t";
                     return o;
                   };
                 }});

  ops.push_back({"inner_exp_norm", "Richter norm squared of exp(-t(1+z)/(1-z))", {"measure", "t"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const double t = parse_real(in(j, "t", p), sub(p, "t"));
                   if (t < 0.0) throw SchemaError({sub(p, "t") + ": must be >= 0"});
                   return [mu, t](const RunContext& ctx) {
                     return from_estimate(richter_norm_sq(DiscFunction::inner_exp(t), mu, ctx.disc));
                   };
                 }});

  ops.push_back({"dtilde_norm_sq", "|F(1)|^2 + half-plane Dirichlet energy", {"function", "weight"}, {"method"},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const HalfPlaneFunction F = parse_halfplane_function(in(j, "function", p), sub(p, "function"));
                   const HalfPlaneWeightSpec w = parse_weight(in(j, "weight", p), sub(p, "weight"));
                   const std::string m = j.value("method", std::string("pullback"));
                   if (m != "pullback" && m != "direct")
                     throw SchemaError({sub(p, "method") + ": expected pullback or direct"});
                   const NormMethod nm = m == "direct" ? NormMethod::direct : NormMethod::pullback;
                   return [F, w, nm](const RunContext& ctx) {
                     return from_estimate(dtilde_norm_sq(F, w, nm, ctx.disc, ctx.halfplane));
                   };
                 }});

  ops.push_back({"transfer_check", "direct half-plane norm of f((s-1)/(s+1)) against the disc eqnorm",
                 {"function", "weight"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const DiscFunction f = parse_disc_function(in(j, "function", p), sub(p, "function"));
                   const HalfPlaneWeightSpec w = parse_weight(in(j, "weight", p), sub(p, "weight"));
                   return [f, w](const RunContext& ctx) { return from_report(transfer_check(f, w, 1e-6, ctx.disc), "transfer"); };
                 }});

  ops.push_back({"two_isometry_defect", "operator norm of the truncated M_z defect (Richter Gram)",
                 {"measure", "degree"}, {"leading"}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const int N = positive_int(j, "degree", p, 2);
                   const int lead = j.contains("leading") ? positive_int(j, "leading", p, 1) : N - 1;
                   return [mu, N, lead](const RunContext& ctx) {
                     const GramModel gm = build_gram(mu, N, ctx.disc);
                     CheckOutcome o;
                     o.value = two_isometry_defect(gm.shift_operator(), lead).norm;
                     o.reference = 0.0;
                     o.provenance = "M_z is a 2-isometry";
                     o.detail.title = "two_isometry_defect";
                     o.detail.record("gram_cross_check", gm.cross_check, "area vs boundary Gram entries");
                     return o;
                   };
                 }});

  ops.push_back({"norm_recursion", "max over n of | ||T^n x||^2 - n ||Tx||^2 + (n-1) ||x||^2 | at x = 1",
                 {"measure", "degree"}, {"n_max"}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const int N = positive_int(j, "degree", p, 2);
                   const int n_max = j.contains("n_max") ? positive_int(j, "n_max", p, 1) : N - 2;
                   if (n_max > N) throw SchemaError({sub(p, "n_max") + ": must not exceed degree"});
                   return [mu, N, n_max](const RunContext& ctx) {
                     const GramModel gm = build_gram(mu, N, ctx.disc);
                     const auto T = gm.shift_operator();
                     const Vector e0 = Vector::Unit(N + 1, 0);
                     CheckOutcome o;
                     for (int n = 1; n <= n_max; ++n) o.value = std::max(o.value, norm_recursion_residual(T, e0, n));
                     o.reference = 0.0;
                     o.provenance = "2-isometry norm recursion";
                     return o;
                   };
                 }});

  ops.push_back({"eqnorm_defect", "<Delta p, p> - |p(0)|^2 in the |f(0)|^2 + energy metric", {"measure", "degree"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const int N = positive_int(j, "degree", p, 2);
                   return [mu, N](const RunContext& ctx) {
                     CheckOutcome o;
                     o.value = eqnorm_defect_residual(build_gram(mu, N, ctx.disc));
                     o.reference = 0.0;
                     o.provenance = "D(zf) = D(f) + integral of |f|^2 d mu";
                     return o;
                   };
                 }});

  ops.push_back({"prop2_fuzz", "agreement of the four semigroup 2-isometry conditions on seeded generators",
                 {"count", "max_dim"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const int count = positive_int(j, "count", p, 1);
                   const int dim = positive_int(j, "max_dim", p, 2);
                   return [count, dim](const RunContext& ctx) {
                     const Prop2Fuzz f = prop2_fuzz(count, dim, ctx.seed);
                     CheckOutcome o;
                     o.value = f.agree;
                     o.reference = f.cases;
                     o.provenance = "all cases agree";
                     o.detail.title = "prop2_fuzz";
                     o.detail.bound("skew_max_residual", f.skew_max_residual, 1e-11);
                     return o;
                   };
                 }});

  ops.push_back({"eigen_lemma", "ker(A+I), kernel intersection of T(t) - e^{-t} and V x0 = 0 for diagonal A",
                 {"diagonal"}, {"times"}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const auto diag = parse_complexes(in(j, "diagonal", p), sub(p, "diagonal"));
                   if (diag.empty()) throw SchemaError({sub(p, "diagonal") + ": must not be empty"});
                   std::vector<double> ts{0.25, 0.5, 1.0, 2.0};
                   if (j.contains("times")) ts = parse_reals(j["times"], sub(p, "times"));
                   return [diag, ts](const RunContext&) {
                     Matrix A = Matrix::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
                     for (std::size_t i = 0; i < diag.size(); ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
                     return from_report(eigen_lemma_check(MatrixOperator(A), ts));
                   };
                 }});

  ops.push_back({"cayley_roundtrip", "||A - generator(cogenerator(A))|| / ||A|| for a seeded matrix", {"dim"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const int d = positive_int(j, "dim", p, 1);
                   return [d](const RunContext& ctx) {
                     const MatrixOperator A(random_matrix(d, ctx.seed));
                     const MatrixOperator back = cayley_generator(cayley_cogenerator(A));
                     CheckOutcome o;
                     o.value = (A.op - back.op).norm() / A.op.norm();
                     o.reference = 0.0;
                     o.provenance = "Cayley transform is an involution pair";
                     return o;
                   };
                 }});

  ops.push_back({"bergman_norm_sq", "weighted Bergman norm of L g against the time-side norm", {"function", "alpha"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction g = parse_time_function(in(j, "function", p), sub(p, "function"));
                   const double a = parse_real(in(j, "alpha", p), sub(p, "alpha"));
                   if (!(a > -1.0)) throw SchemaError({sub(p, "alpha") + ": must be > -1"});
                   return [g, a](const RunContext& ctx) {
                     CheckOutcome o = from_estimate(bergman_norm_sq(laplace_transform(g), a, ctx.halfplane));
                     const Estimate t = timeside_norm_sq(g, a);
                     o.detail.title = "bergman_norm_sq";
                     o.detail.record("timeside", t.value, to_string(t.status));
                     if (t.finite()) {
                       o.reference = t.value;
                       o.provenance = "time-side quadrature";
                     }
                     return o;
                   };
                 }});

  ops.push_back({"timeside_norm_sq", "(pi Gamma(1+alpha)/2^alpha) integral of |g|^2 t^{-1-alpha}", {"function", "alpha"},
                 {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction g = parse_time_function(in(j, "function", p), sub(p, "function"));
                   const double a = parse_real(in(j, "alpha", p), sub(p, "alpha"));
                   if (!(a > -1.0)) throw SchemaError({sub(p, "alpha") + ": must be > -1"});
                   return [g, a](const RunContext&) { return from_estimate(timeside_norm_sq(g, a)); };
                 }});

  ops.push_back({"laplace", "closed-form transform against panel quadrature at the given points", {"function", "points"},
                 {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction f = parse_time_function(in(j, "function", p), sub(p, "function"));
                   const auto pts = parse_complexes(in(j, "points", p), sub(p, "points"));
                   for (std::size_t i = 0; i < pts.size(); ++i)
                     if (!(pts[i].real() > 0.0))
                       throw SchemaError({sub(p, "points") + "/" + std::to_string(i) + ": Re s must be > 0"});
                   return [f, pts](const RunContext&) {
                     CheckOutcome o;
                     for (cplx s : pts) {
                       const cplx v = laplace(f, s);
                       o.value = std::max(o.value, std::abs(v - laplace_quadrature(f, s)) / std::max(1.0, std::abs(v)));
                     }
                     o.reference = 0.0;
                     o.provenance = "panel quadrature";
                     return o;
                   };
                 }});

  ops.push_back({"item2_check", "(1/pi) int |F'|^2 x against (1/2) int |f|^2", {"function"}, {},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction f = parse_time_function(in(j, "function", p), sub(p, "function"));
                   return [f](const RunContext&) { return from_report(item2_check(f), "item2"); };
                 }});

  ops.push_back({"item3_check", "Poisson-weighted area integral against the prefix-transform integral",
                 {"function", "tau"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction f = parse_time_function(in(j, "function", p), sub(p, "function"));
                   const double tau = parse_real(in(j, "tau", p), sub(p, "tau"));
                   return [f, tau](const RunContext&) { return from_report(item3_check(f, tau), "item3"); };
                 }});

  ops.push_back({"h_norm_sq", "time-domain norm; its reference is the half-plane norm of the transform",
                 {"function", "weight"}, {"include_eval", "bare_constants"},
                 [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction f = parse_time_function(in(j, "function", p), sub(p, "function"));
                   HNormSpec spec;
                   spec.weight = parse_weight(in(j, "weight", p), sub(p, "weight"));
                   spec.include_eval = bool_or(j, "include_eval", p, true);
                   spec.bare_constants = bool_or(j, "bare_constants", p, false);
                   return [f, spec](const RunContext& ctx) {
                     CheckOutcome o = from_estimate(h_norm_sq(f, spec));
                     if (!spec.bare_constants) {
                       const HalfPlaneFunction F = laplace_transform(f);
                       Estimate d = dtilde_norm_sq(F, spec.weight, NormMethod::pullback, ctx.disc, ctx.halfplane);
                       if (!spec.include_eval) d = d + Estimate::exact(-std::norm(F(1.0)));
                       if (d.finite()) {
                         o.reference = d.value;
                         o.provenance = "half-plane norm of the transform";
                       }
                     }
                     return o;
                   };
                 }});

  ops.push_back({"shift_correspondence", "h-norm of S_t f against the half-plane norm of e^{-ts} L f",
                 {"function", "weight", "times"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const TimeFunction f = parse_time_function(in(j, "function", p), sub(p, "function"));
                   HNormSpec spec;
                   spec.weight = parse_weight(in(j, "weight", p), sub(p, "weight"));
                   const auto ts = parse_reals(in(j, "times", p), sub(p, "times"));
                   for (std::size_t i = 0; i < ts.size(); ++i)
                     if (ts[i] < 0.0) throw SchemaError({sub(p, "times") + "/" + std::to_string(i) + ": must be >= 0"});
                   return [f, spec, ts](const RunContext& ctx) {
                     return from_report(shift_correspondence_check(f, spec, ts, 1e-4, ctx.seed));
                   };
                 }});

  ops.push_back({"wandering_vector", "dimension of M minus zM for M generated by the given polynomials",
                 {"measure", "generators", "degree"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const auto gens = parse_polynomials(in(j, "generators", p), sub(p, "generators"));
                   const int N = positive_int(j, "degree", p, 2);
                   return [mu, gens, N](const RunContext& ctx) {
                     CheckOutcome o;
                     o.value = wandering_vector(build_gram(mu, N, ctx.disc), gens).dim;
                     o.reference = 1.0;
                     o.provenance = "cyclic invariant subspace";
                     return o;
                   };
                 }});

  ops.push_back({"representation_check", "principal angles between M and phi P at several truncations",
                 {"measure", "generators", "degrees"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const auto gens = parse_polynomials(in(j, "generators", p), sub(p, "generators"));
                   std::vector<int> Ns;
                   const Json& d = in(j, "degrees", p);
                   if (!d.is_array() || d.empty()) throw SchemaError({sub(p, "degrees") + ": expected a non-empty array"});
                   for (std::size_t i = 0; i < d.size(); ++i) {
                     Ns.push_back(parse_int(d[i], sub(p, "degrees") + "/" + std::to_string(i)));
                     if (Ns.back() < 2) throw SchemaError({sub(p, "degrees") + "/" + std::to_string(i) + ": must be >= 2"});
                   }
                   return [mu, gens, Ns](const RunContext& ctx) {
                     return from_report(representation_stability(mu, gens, Ns, ctx.disc));
                   };
                 }});

  ops.push_back({"boost_consistency", "boost_line(push(mu), psi) against push(boost_circle(mu, phi)) on atoms",
                 {"measure", "function"}, {}, [](const Json& j, const std::string& p) -> CheckRunner {
                   const CircleMeasure mu = parse_circle_measure(in(j, "measure", p), sub(p, "measure"));
                   const DiscFunction phi = parse_disc_function(in(j, "function", p), sub(p, "function"));
                   return [mu, phi](const RunContext&) {
                     const HalfPlaneWeightSpec a = boost_weight(push_circle_to_line(mu), to_halfplane(phi));
                     const HalfPlaneWeightSpec b = push_circle_to_line(boost_circle(mu, phi));
                     CheckOutcome o;
                     o.reference = 0.0;
                     o.provenance = "boost commutes with the Cayley transfer";
                     o.value = std::abs(a.rho - b.rho) / std::max(1.0, std::abs(b.rho));
                     const auto& aa = a.nu.atoms();
                     const auto& ba = b.nu.atoms();
                     if (aa.size() != ba.size()) {
                       o.value = INFINITY;
                       return o;
                     }
                     for (std::size_t i = 0; i < aa.size(); ++i)
                       o.value = std::max({o.value, std::abs(aa[i].tau - ba[i].tau) / std::max(1.0, std::abs(ba[i].tau)),
                                           std::abs(aa[i].mass - ba[i].mass) / std::max(1.0, ba[i].mass)});
                     return o;
                   };
                 }});

  std::sort(ops.begin(), ops.end(), [](const OperationInfo& a, const OperationInfo& b) { return a.name < b.name; });
  return ops;
}

// ---- formatting -------------------------------------------------------------

std::string json_string(const std::string& s) { return Json(s).dump(); }

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::string json_opt(const std::optional<double>& v) { return v ? json_number(*v) : "null"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<OperationInfo>& operation_catalog() {
  static const std::vector<OperationInfo> ops = make_catalog();
  return ops;
}

const OperationInfo* find_operation(std::string_view name) {
  for (const auto& op : operation_catalog())
    if (op.name == name) return &op;
  return nullptr;
}

std::string inputs_digest(const Json& inputs) {
  const std::string s = inputs.dump();  // object keys are stored sorted
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Campaign parse_campaign(const Json& doc) {
  std::vector<std::string> problems;
  Campaign c;
  if (!doc.is_object()) throw SchemaError({"/: expected an object"});
  if (!doc.contains("name") || !doc["name"].is_string())
    problems.push_back("/name: missing or not a string");
  else
    c.name = doc["name"].get<std::string>();

  auto budget = [&](const Json& b, const char* key, std::optional<int>& out) {
    if (!b.contains(key)) return;
    if (!b[key].is_number_integer() || b[key].get<int>() < 4)
      problems.push_back(std::string("/budgets/") + key + ": expected an integer >= 4");
    else
      out = b[key].get<int>();
  };
  if (doc.contains("budgets")) {
    const Json& b = doc["budgets"];
    if (!b.is_object()) {
      problems.push_back("/budgets: expected an object");
    } else {
      budget(b, "quad_radial", c.quad_radial);
      budget(b, "quad_angular", c.quad_angular);
      budget(b, "halfplane_gauss", c.halfplane_gauss);
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
      problems.push_back("/seed: expected a non-negative integer");
    else
      c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    const Json& o = doc["output"];
    if (!o.is_object()) {
      problems.push_back("/output: expected an object");
    } else {
      if (o.contains("path")) {
        if (o["path"].is_string())
          c.output_path = o["path"].get<std::string>();
        else
          problems.push_back("/output/path: expected a string");
      }
      if (o.contains("format")) {
        if (o["format"] == "csv" || o["format"] == "json")
          c.format = o["format"].get<std::string>();
        else
          problems.push_back("/output/format: expected csv or json");
      }
    }
  }

  if (!doc.contains("checks") || !doc["checks"].is_array()) {
    problems.push_back("/checks: missing or not an array");
  } else {
    std::set<std::string> ids;
    const Json& checks = doc["checks"];
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const std::string p = "/checks/" + std::to_string(i);
      const Json& cj = checks[i];
      if (!cj.is_object()) {
        problems.push_back(p + ": expected an object");
        continue;
      }
      CheckSpec s;
      if (!cj.contains("id") || !cj["id"].is_string()) {
        problems.push_back(p + "/id: missing or not a string");
      } else {
        s.id = cj["id"].get<std::string>();
        if (!ids.insert(s.id).second) problems.push_back(p + "/id: duplicate id '" + s.id + "'");
      }
      const OperationInfo* op = nullptr;
      if (!cj.contains("operation") || !cj["operation"].is_string()) {
        problems.push_back(p + "/operation: missing or not a string");
      } else {
        s.operation = cj["operation"].get<std::string>();
        op = find_operation(s.operation);
        if (!op) problems.push_back(p + "/operation: unknown operation '" + s.operation + "'");
      }
      if (cj.contains("tolerance")) {
        if (!cj["tolerance"].is_number() || !(cj["tolerance"].get<double>() > 0.0))
          problems.push_back(p + "/tolerance: must be a number > 0");
        else
          s.tolerance = cj["tolerance"].get<double>();
      }
      if (cj.contains("reference")) {
        if (!cj["reference"].is_number())
          problems.push_back(p + "/reference: expected a number");
        else
          s.reference = cj["reference"].get<double>();
      }
      if (cj.contains("provenance")) {
        if (!cj["provenance"].is_string())
          problems.push_back(p + "/provenance: expected a string");
        else
          s.provenance = cj["provenance"].get<std::string>();
      }
      if (cj.contains("expect")) {
        if (cj["expect"] == "finite")
          s.expect = Expectation::finite;
        else if (cj["expect"] == "divergent")
          s.expect = Expectation::divergent;
        else
          problems.push_back(p + "/expect: expected finite or divergent");
      }
      if (cj.contains("relative")) {
        if (!cj["relative"].is_boolean())
          problems.push_back(p + "/relative: expected true or false");
        else
          s.relative = cj["relative"].get<bool>();
      }
      s.inputs = cj.value("inputs", Json::object());
      if (!s.inputs.is_object()) {
        problems.push_back(p + "/inputs: expected an object");
        continue;
      }
      if (!op) continue;
      for (const auto& [key, _] : s.inputs.items()) {
        const bool known = std::find(op->inputs.begin(), op->inputs.end(), key) != op->inputs.end() ||
                           std::find(op->optional_inputs.begin(), op->optional_inputs.end(), key) != op->optional_inputs.end();
        if (!known) problems.push_back(p + "/inputs/" + key + ": not an input of " + op->name);
      }
      try {
        s.runner = op->prepare(s.inputs, p + "/inputs");
      } catch (const SchemaError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
      }
      c.checks.push_back(std::move(s));
    }
  }
  if (!problems.empty()) throw SchemaError(std::move(problems));
  return c;
}

Campaign load_campaign(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw SchemaError({path.string() + ": cannot read"});
  Json doc;
  try {
    doc = Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw SchemaError({path.string() + ": " + e.what()});
  }
  return parse_campaign(doc);
}

int CampaignReport::exit_code() const {
  if (divergent > 0) return 2;
  if (failed > 0) return 1;
  return 0;
}

CampaignReport run_campaign(const Campaign& c, const RunOptions& opt) {
  RunContext ctx;
  if (c.quad_radial) ctx.disc.n_r = *c.quad_radial;
  if (c.quad_angular) ctx.disc.n_theta = *c.quad_angular;
  if (c.halfplane_gauss) ctx.halfplane.n_gauss = *c.halfplane_gauss;
  if (opt.quad_radial) ctx.disc.n_r = *opt.quad_radial;
  if (opt.quad_angular) ctx.disc.n_theta = *opt.quad_angular;
  ctx.disc.validate();
  ctx.seed = opt.seed ? *opt.seed : c.seed;

  CampaignReport rep;
  rep.name = c.name;
  rep.timings = opt.timings;
  rep.rows.resize(c.checks.size());

  auto run_one = [&](std::size_t i) {
    const CheckSpec& s = c.checks[i];
    CheckRow& row = rep.rows[i];
    row.id = s.id;
    row.operation = s.operation;
    row.inputs_digest = inputs_digest(s.inputs);
    row.tolerance = opt.tolerance ? *opt.tolerance : s.tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      CheckOutcome o = s.runner(ctx);
      row.value = o.value;
      row.status = o.status;
      row.reference = s.reference ? s.reference : o.reference;
      row.provenance = s.reference ? (s.provenance.empty() ? std::string("campaign") : s.provenance) : o.provenance;
      row.detail = std::move(o.detail);
      if (row.reference) {
        const double r = *row.reference;
        row.residual = std::abs(row.value - r);
        if (s.relative && r != 0.0) row.residual /= std::abs(r);
      }
      const bool detail_ok = row.detail.passed();
      if (o.status == Convergence::divergent) {
        row.verdict = s.expect == Expectation::divergent ? Verdict::pass : Verdict::divergent;
        row.note = "divergent";
      } else if (s.expect == Expectation::divergent) {
        row.verdict = Verdict::fail;
        row.note = "expected divergence, got a finite value";
      } else {
        const bool ok = (!row.reference || row.residual <= row.tolerance) && detail_ok;
        row.verdict = ok ? Verdict::pass : Verdict::fail;
        if (o.status == Convergence::unconverged) row.note = "unconverged";
        if (!detail_ok) row.note += row.note.empty() ? "detail check failed" : "; detail check failed";
      }
    } catch (const std::exception& e) {
      row.verdict = Verdict::fail;
      row.note = std::string("error: ") + e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(std::max<std::size_t>(1, c.checks.size()))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < c.checks.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < jobs; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < c.checks.size(); i = next++) run_one(i);
      });
  }

  for (const auto& row : rep.rows) {
    if (row.verdict == Verdict::pass) ++rep.passed;
    if (row.verdict == Verdict::fail) ++rep.failed;
    if (row.verdict == Verdict::divergent) ++rep.divergent;
  }
  return rep;
}

std::string to_csv(const CampaignReport& r) {
  std::ostringstream os;
  os << "check_id,operation,inputs_digest,value,reference,provenance,residual,tolerance,verdict,seconds\n";
  for (const auto& row : r.rows) {
    os << csv_field(row.id) << ',' << row.operation << ',' << row.inputs_digest << ',' << format_double(row.value) << ','
       << (row.reference ? format_double(*row.reference) : "") << ',' << csv_field(row.provenance) << ','
       << format_double(row.residual) << ',' << format_double(row.tolerance) << ',' << to_string(row.verdict) << ','
       << (r.timings ? format_double(row.seconds) : "") << '\n';
  }
  return os.str();
}

std::string to_json(const CampaignReport& r) {
  std::ostringstream os;
  os << "{\n  \"campaign\": " << json_string(r.name) << ",\n";
  os << "  \"summary\": {\"checks\": " << r.rows.size() << ", \"pass\": " << r.passed << ", \"fail\": " << r.failed
     << ", \"divergent\": " << r.divergent << ", \"exit_code\": " << r.exit_code() << "},\n";
  os << "  \"rows\": [";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    os << (i ? ",\n" : "\n") << "    {\"check_id\": " << json_string(row.id) << ", \"operation\": " << json_string(row.operation)
       << ", \"inputs_digest\": " << json_string(row.inputs_digest) << ", \"value\": " << json_number(row.value)
       << ", \"reference\": " << json_opt(row.reference) << ", \"provenance\": " << json_string(row.provenance)
       << ", \"residual\": " << json_number(row.residual) << ", \"tolerance\": " << json_number(row.tolerance)
       << ", \"verdict\": " << json_string(to_string(row.verdict)) << ", \"status\": " << json_string(to_string(row.status))
       << ", \"note\": " << json_string(row.note);
    if (r.timings) os << ", \"seconds\": " << json_number(row.seconds);
    os << ", \"detail\": [";
    for (std::size_t k = 0; k < row.detail.items.size(); ++k) {
      const auto& it = row.detail.items[k];
      os << (k ? ", " : "") << "{\"name\": " << json_string(it.name) << ", \"value\": " << json_number(it.value)
         << ", \"reference\": " << json_opt(it.reference) << ", \"residual\": " << json_number(it.residual)
         << ", \"tolerance\": " << json_number(it.tolerance) << ", \"verdict\": " << json_string(to_string(it.verdict))
         << ", \"gated\": " << (it.gated ? "true" : "false") << ", \"note\": " << json_string(it.note) << "}";
    }
    os << "]}";
  }
  os << (r.rows.empty() ? "]\n" : "\n  ]\n") << "}\n";
  return os.str();
}


std::vector<ReferenceRow> reference_rows(const RunContext& ctx) {
  std::vector<ReferenceRow> rows;
  auto add = [&](std::string table, std::string name, double v, double ref, std::string prov) {
    const double res = std::abs(v - ref) / (ref != 0.0 ? std::abs(ref) : 1.0);
    rows.push_back({std::move(table), std::move(name), v, ref, res, std::move(prov)});
  };

  const std::vector<std::pair<std::string, CircleMeasure>> measures{
      {"dirac(-1)", CircleMeasure::dirac(kPi)},
      {"dirac(i)", CircleMeasure::dirac(kPi / 2)},
      {"lebesgue", CircleMeasure::lebesgue()},
      {"mixture", CircleMeasure::dirac(kPi, 0.5) + CircleMeasure::dirac(kPi / 2, 0.25) + CircleMeasure::lebesgue(0.25)}};
  for (const auto& [mname, mu] : measures)
    for (int n = 1; n <= 8; ++n) {
      const DiscFunction f = DiscFunction::monomial(n);
      const double ref = n * total_mass(mu);
      const std::string c = mname + ",n=" + std::to_string(n);
      add("monomial_law_area", c, dirichlet_energy(f, mu, ctx.disc).value, ref, "n mu(T)");
      add("monomial_law_boundary", c, boundary_energy(f, mu).value, ref, "n mu(T)");
    }

  for (double t : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const double v = richter_norm_sq(DiscFunction::inner_exp(t), CircleMeasure::dirac(kPi), ctx.disc).value;
    add("inner_exp_norm", "t=" + format_double(t), v, 1.0 + t / 2.0, "1 + D_{-1}(phi_t) = 1 + t/2");
  }

  for (double a : {0.5, 1.0, 2.0}) {
    const TimeFunction g = TimeFunction::exp_poly({{1, a, 1.0}});
    const double ref = kPi / (4.0 * a);
    const std::string c = "alpha=1,a=" + format_double(a);
    add("bergman", c, bergman_norm_sq(laplace_transform(g), 1.0, ctx.halfplane).value, ref, "pi/(4a)");
    add("timeside", c, timeside_norm_sq(g, 1.0).value, ref, "pi/(4a)");
  }

  const TimeFunction e1 = TimeFunction::exp(1.0);
  const Report p2 = item2_check(e1);
  add("plancherel", "item2,f=exp(-t)", p2.find("item2")->value, 0.25, "(1/2) int e^{-2t} dt");
  for (double tau : {0.0, 1.0}) {
    const Report p3 = item3_check(e1, tau);
    const ReportItem* it = p3.find("item3");
    add("plancherel", "item3,tau=" + format_double(tau), it->value, *it->reference, "prefix-transform integral");
  }

  HalfPlaneWeightSpec w;
  w.rho = 1.0;
  const HalfPlaneFunction F = HalfPlaneFunction::rational({1.0}, {1.0, 1.0});
  add("transfer", "pullback", dtilde_norm_sq(F, w, NormMethod::pullback, ctx.disc, ctx.halfplane).value, 0.5,
      "1/4 + 1/4");
  add("transfer", "direct", dtilde_norm_sq(F, w, NormMethod::direct, ctx.disc, ctx.halfplane).value, 0.5, "1/4 + 1/4");

  HNormSpec hs;
  hs.weight = w;
  add("h_norm", "f=exp(-t),rho=1", h_norm_sq(e1, hs).value, 0.5, "1/4 + 1/4");
  return rows;
}

std::vector<std::filesystem::path> emit_reference_tables(const std::filesystem::path& dir, const RunContext& ctx) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<ReferenceRow>> tables;
  for (auto& r : reference_rows(ctx)) tables[r.table].push_back(std::move(r));
  std::vector<std::filesystem::path> out;
  for (const auto& [name, rows] : tables) {
    const auto path = dir / (name + ".csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "case,value,reference,residual,provenance\n";
    for (const auto& r : rows)
      os << csv_field(r.case_name) << ',' << format_double(r.value) << ',' << format_double(r.reference) << ','
         << format_double(r.residual) << ',' << csv_field(r.provenance) << '\n';
    out.push_back(path);
  }
  return out;
}

}  // namespace dflow
