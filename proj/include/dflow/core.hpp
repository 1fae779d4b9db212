#pragma once

#include <array>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace dflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Raised when an argument lies outside the domain of an operation
/// (e.g. |z| >= 1 for a disc evaluation, Re s <= 0 on the half-plane).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an operation's precondition fails (singular A - I, invalid measure, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Convergence { converged, unconverged, divergent };

const char* to_string(Convergence c);

/// Result of a refinement-controlled quadrature.
///
/// `levels` holds the values at the three refinement levels that decided
/// `status`; `value` is the best available estimate (the finest level, or a
/// separately computed full-domain value for truncation schemes). Divergence
/// is a legitimate outcome, not an error.
struct Estimate {
  double value = 0.0;
  Convergence status = Convergence::converged;
  std::array<double, 3> levels{};

  bool finite() const { return status != Convergence::divergent; }
  bool divergent() const { return status == Convergence::divergent; }

  static Estimate exact(double v) { return {v, Convergence::converged, {v, v, v}}; }
};

/// Sum of two independent estimates; the worst status wins.
Estimate operator+(const Estimate& a, const Estimate& b);
Estimate operator*(double c, const Estimate& a);

/// Three-level refinement verdict. Divergent when the values grow by at least
/// `growth` per level with no Cauchy contraction (the last increment is not
/// smaller than half the previous one). Otherwise converged when the last two
/// levels agree to `tol` relative (absolute below 1).
Convergence classify_levels(const std::array<double, 3>& v, double tol, double growth = 1.1);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform
/// (std::uniform_real_distribution is not).
inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace dflow
