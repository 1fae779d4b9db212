#include "dflow/config.hpp"

#include <cmath>

namespace dflow {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw SchemaError({path + ": " + msg}); }

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "/" + key, "missing");
  return *it;
}

std::string type_of(const Json& j, const std::string& path) {
  const Json& t = field(j, "type", path);
  if (!t.is_string()) fail(path + "/type", "expected a string");
  return t.get<std::string>();
}

template <class F>
auto guarded(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const PreconditionError& e) {
    fail(path, e.what());
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

std::optional<DensityTable> parse_density(const Json& j, const std::string& path) {
  const auto it = j.find("density");
  if (it == j.end() || it->is_null()) return std::nullopt;
  const std::string p = path + "/density";
  return DensityTable{parse_reals(field(*it, "grid", p), p + "/grid"), parse_reals(field(*it, "values", p), p + "/values")};
}

template <class T, class Combine>
T fold_terms(const Json& j, const std::string& path, T (*parse)(const Json&, const std::string&), Combine&& combine) {
  const Json& terms = field(j, "terms", path);
  if (!terms.is_array() || terms.empty()) fail(path + "/terms", "expected a non-empty array");
  T acc = parse(terms[0], path + "/terms/0");
  for (std::size_t i = 1; i < terms.size(); ++i) acc = combine(acc, parse(terms[i], path + "/terms/" + std::to_string(i)));
  return acc;
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> problems)
    : std::runtime_error(problems.empty() ? std::string("schema error") : problems.front()),
      problems_(std::move(problems)) {}

double parse_real(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

int parse_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

cplx parse_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return parse_real(j, path);
  if (j.is_array() && j.size() == 2) return {parse_real(j[0], path + "/0"), parse_real(j[1], path + "/1")};
  fail(path, "expected a number or [re, im]");
}

std::vector<double> parse_reals(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_real(j[i], path + "/" + std::to_string(i)));
  return v;
}

std::vector<cplx> parse_complexes(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<cplx> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_complex(j[i], path + "/" + std::to_string(i)));
  return v;
}

CircleMeasure parse_circle_measure(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("type")) {
    const std::string t = type_of(j, path);
    if (t == "lebesgue") {
      const double c = j.contains("c") ? parse_real(j["c"], path + "/c") : 1.0;
      return guarded(path, [&] { return CircleMeasure::lebesgue(c); });
    }
    if (t == "dirac") {
      const double th = parse_real(field(j, "theta", path), path + "/theta");
      const double m = j.contains("mass") ? parse_real(j["mass"], path + "/mass") : 1.0;
      return guarded(path, [&] { return CircleMeasure::dirac(th, m); });
    }
    if (t == "sum")
      return fold_terms<CircleMeasure>(j, path, &parse_circle_measure,
                                       [&](const CircleMeasure& a, const CircleMeasure& b) {
                                         return guarded(path, [&] { return a + b; });
                                       });
    fail(path + "/type", "unknown measure type '" + t + "'");
  }
  std::vector<CircleAtom> atoms;
  if (const auto it = j.find("atoms"); it != j.end()) {
    if (!it->is_array()) fail(path + "/atoms", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = path + "/atoms/" + std::to_string(i);
      atoms.push_back({parse_real(field((*it)[i], "theta", p), p + "/theta"), parse_real(field((*it)[i], "mass", p), p + "/mass")});
    }
  }
  auto density = parse_density(j, path);
  return guarded(path, [&] { return CircleMeasure(std::move(atoms), std::move(density)); });
}

HalfPlaneWeightSpec parse_weight(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  HalfPlaneWeightSpec w;
  w.rho = j.contains("rho") ? parse_real(j["rho"], path + "/rho") : 0.0;
  if (const auto it = j.find("nu"); it != j.end()) {
    const std::string p = path + "/nu";
    if (!it->is_object()) fail(p, "expected an object");
    std::vector<LineAtom> atoms;
    if (const auto at = it->find("atoms"); at != it->end()) {
      if (!at->is_array()) fail(p + "/atoms", "expected an array");
      for (std::size_t i = 0; i < at->size(); ++i) {
        const std::string q = p + "/atoms/" + std::to_string(i);
        atoms.push_back({parse_real(field((*at)[i], "tau", q), q + "/tau"), parse_real(field((*at)[i], "mass", q), q + "/mass")});
      }
    }
    auto density = parse_density(*it, p);
    w.nu = guarded(p, [&] { return LineMeasure(std::move(atoms), std::move(density)); });
  }
  guarded(path, [&] {
    w.validate();
    return 0;
  });
  return w;
}

DiscFunction parse_disc_function(const Json& j, const std::string& path) {
  const std::string t = type_of(j, path);
  if (t == "polynomial")
    return guarded(path, [&] { return DiscFunction::polynomial(parse_complexes(field(j, "coeffs", path), path + "/coeffs")); });
  if (t == "monomial") {
    const int n = parse_int(field(j, "n", path), path + "/n");
    if (n < 0) fail(path + "/n", "must be >= 0");
    const cplx c = j.contains("c") ? parse_complex(j["c"], path + "/c") : cplx(1.0);
    return DiscFunction::monomial(n, c);
  }
  if (t == "inner_exp") {
    const double s = parse_real(field(j, "t", path), path + "/t");
    return guarded(path, [&] { return DiscFunction::inner_exp(s); });
  }
  if (t == "cayley_exp") {
    const cplx c = parse_complex(field(j, "c", path), path + "/c");
    return guarded(path, [&] { return DiscFunction::cayley_exp(c); });
  }
  if (t == "sum")
    return fold_terms<DiscFunction>(j, path, &parse_disc_function, [](const DiscFunction& a, const DiscFunction& b) { return a + b; });
  if (t == "product")
    return fold_terms<DiscFunction>(j, path, &parse_disc_function, [](const DiscFunction& a, const DiscFunction& b) { return a * b; });
  fail(path + "/type", "unknown disc function type '" + t + "'");
}

HalfPlaneFunction parse_halfplane_function(const Json& j, const std::string& path) {
  const std::string t = type_of(j, path);
  if (t == "rational") {
    auto p = parse_complexes(field(j, "p", path), path + "/p");
    auto q = parse_complexes(field(j, "q", path), path + "/q");
    return guarded(path, [&] { return HalfPlaneFunction::rational(p, q); });
  }
  if (t == "constant") return HalfPlaneFunction::constant(parse_complex(field(j, "c", path), path + "/c"));
  if (t == "exp_line") {
    const double s = parse_real(field(j, "t", path), path + "/t");
    return guarded(path, [&] { return HalfPlaneFunction::exp_line(s); });
  }
  if (t == "laplace") {
    const TimeFunction f = parse_time_function(field(j, "of", path), path + "/of");
    return guarded(path, [&] { return laplace_transform(f); });
  }
  if (t == "sum")
    return fold_terms<HalfPlaneFunction>(j, path, &parse_halfplane_function,
                                         [](const HalfPlaneFunction& a, const HalfPlaneFunction& b) { return a + b; });
  if (t == "product")
    return fold_terms<HalfPlaneFunction>(j, path, &parse_halfplane_function,
                                         [](const HalfPlaneFunction& a, const HalfPlaneFunction& b) { return a * b; });
  fail(path + "/type", "unknown half-plane function type '" + t + "'");
}

TimeFunction parse_time_function(const Json& j, const std::string& path) {
  const std::string t = type_of(j, path);
  if (t == "zero") return TimeFunction::zero();
  if (t == "exp_poly") {
    const Json& terms = field(j, "terms", path);
    if (!terms.is_array()) fail(path + "/terms", "expected an array");
    std::vector<ExpPolyTerm> v;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string p = path + "/terms/" + std::to_string(i);
      ExpPolyTerm term;
      term.k = terms[i].contains("k") ? parse_int(terms[i]["k"], p + "/k") : 0;
      term.a = parse_real(field(terms[i], "a", p), p + "/a");
      term.coeff = terms[i].contains("coeff") ? parse_complex(terms[i]["coeff"], p + "/coeff") : cplx(1.0);
      v.push_back(term);
    }
    const double shift = j.contains("shift") ? parse_real(j["shift"], path + "/shift") : 0.0;
    return guarded(path, [&] { return TimeFunction::exp_poly(v, shift); });
  }
  if (t == "samples") {
    auto grid = parse_reals(field(j, "grid", path), path + "/grid");
    auto values = parse_complexes(field(j, "values", path), path + "/values");
    std::optional<double> rate;
    if (const auto it = j.find("tail"); it != j.end() && !it->is_null()) {
      const std::string p = path + "/tail";
      if (type_of(*it, p) != "exp") fail(p + "/type", "only exponential tails are supported");
      rate = parse_real(field(*it, "a", p), p + "/a");
    }
    TimeFunction f = guarded(path, [&] { return TimeFunction::samples(grid, values, rate); });
    if (j.contains("shift")) f = guarded(path, [&] { return right_shift(f, parse_real(j["shift"], path + "/shift")); });
    return f;
  }
  if (t == "sum")
    return fold_terms<TimeFunction>(j, path, &parse_time_function, [](const TimeFunction& a, const TimeFunction& b) { return a + b; });
  fail(path + "/type", "unknown time function type '" + t + "'");
}

std::vector<std::vector<cplx>> parse_polynomials(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of coefficient lists");
  std::vector<std::vector<cplx>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_complexes(j[i], path + "/" + std::to_string(i)));
  return out;
}

}  // namespace dflow
