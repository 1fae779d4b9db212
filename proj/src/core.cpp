#include "dflow/core.hpp"

#include <algorithm>
#include <cmath>

namespace dflow {

const char* to_string(Convergence c) {
  switch (c) {
    case Convergence::converged: return "converged";
    case Convergence::unconverged: return "unconverged";
    case Convergence::divergent: return "divergent";
  }
  return "unknown";
}

namespace {
Convergence worst(Convergence a, Convergence b) {
  return static_cast<int>(a) > static_cast<int>(b) ? a : b;
}
}  // namespace

Estimate operator+(const Estimate& a, const Estimate& b) {
  Estimate r;
  r.value = a.value + b.value;
  r.status = worst(a.status, b.status);
  for (std::size_t i = 0; i < r.levels.size(); ++i) r.levels[i] = a.levels[i] + b.levels[i];
  return r;
}

Estimate operator*(double c, const Estimate& a) {
  Estimate r = a;
  r.value *= c;
  for (double& l : r.levels) l *= c;
  return r;
}

Convergence classify_levels(const std::array<double, 3>& v, double tol, double growth) {
  const double d1 = v[1] - v[0];
  const double d2 = v[2] - v[1];
  const bool grows = v[0] > 0.0 && v[1] >= growth * v[0] && v[2] >= growth * v[1];
  const bool contracts = std::abs(d2) <= 0.5 * std::abs(d1);
  if (grows && !contracts) return Convergence::divergent;
  if (!std::isfinite(v[2])) return Convergence::divergent;
  if (std::abs(d2) <= tol * std::max(1.0, std::abs(v[2]))) return Convergence::converged;
  return Convergence::unconverged;
}

}  // namespace dflow
