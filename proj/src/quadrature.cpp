#include "dflow/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dflow/core.hpp"

namespace dflow {

namespace {

// Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

Rule1D compute_gauss_legendre(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre(n, x);
      const double dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[m - 1] = 0.0;
  return r;
}

std::atomic<unsigned> g_threads{1};

constexpr std::size_t kBlock = 2048;

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule1D>(compute_gauss_legendre(n));
  return *slot;
}

Rule1D gauss_legendre(int n, double a, double b) {
  const Rule1D& ref = gauss_legendre(n);
  Rule1D r;
  r.x.resize(ref.size());
  r.w.resize(ref.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    r.x[i] = mid + half * ref.x[i];
    r.w[i] = half * ref.w[i];
  }
  return r;
}

Rule1D paneled_rule(std::span<const double> breaks, int n) {
  Rule1D r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    if (!(breaks[p + 1] > breaks[p])) continue;
    const Rule1D g = gauss_legendre(n, breaks[p], breaks[p + 1]);
    r.x.insert(r.x.end(), g.x.begin(), g.x.end());
    r.w.insert(r.w.end(), g.w.begin(), g.w.end());
  }
  return r;
}

std::vector<double> dyadic_breaks(double center, double outer) {
  std::vector<double> b{center};
  for (double d = 0.25; d <= outer; d *= 2.0) {
    b.push_back(center - d);
    b.push_back(center + d);
  }
  std::sort(b.begin(), b.end());
  return b;
}

namespace {
constexpr double kOuter = 64.0;

// Tail [0, inf) -> d = kOuter * v/(1-v) + kOuter, returned as offsets from kOuter's edge.
void add_tail(Rule1D& r, int n, double origin, double sign) {
  const Rule1D& g = gauss_legendre(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = 0.5 * (g.x[i] + 1.0);
    const double om = 1.0 - v;
    r.x.push_back(origin + sign * kOuter / om);
    r.w.push_back(0.5 * g.w[i] * kOuter / (om * om));
  }
}
}  // namespace

Rule1D half_line_rule(int n) {
  std::vector<double> br{0.0};
  for (double x = 1.0 / 64.0; x <= kOuter; x *= 4.0) br.push_back(x);
  Rule1D r = paneled_rule(br, n);
  add_tail(r, n, 0.0, 1.0);
  return r;
}

Rule1D real_line_rule(double center, int n) {
  Rule1D r = paneled_rule(dyadic_breaks(center, kOuter), n);
  add_tail(r, n, center, 1.0);
  add_tail(r, n, center, -1.0);
  return r;
}

Rule1D slope_rule(double x, double tau, int n) {
  std::vector<double> br{-0.5 * kPi, 0.5 * kPi, 0.0};
  for (double b : dyadic_breaks(0.0, kOuter)) br.push_back(std::atan((b - tau) / x));
  for (double r = 1.0; x * r < 0.25; r *= 2.0) {
    br.push_back(std::atan(r));
    br.push_back(-std::atan(r));
  }
  std::sort(br.begin(), br.end());
  return paneled_rule(br, n);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

void set_quadrature_threads(unsigned n) { g_threads = n == 0 ? 1 : n; }
unsigned quadrature_threads() { return g_threads; }

double block_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    std::vector<double> terms(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) terms[i - lo] = f(i);
    partial[b] = pairwise_sum(terms);
  };
  const unsigned threads = std::min<std::size_t>(g_threads.load(), nblocks);
  if (threads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < nblocks; b = next++) run_block(b);
      });
    }
  }
  return pairwise_sum(partial);
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 30, tol);
}

}  // namespace dflow
