#pragma once

// Measure (gauge) functions h(t) = t^d eps(t) and Dini-type integral tests.

#include <utility>
#include <variant>
#include <vector>

namespace qcdist {

/// eps == 1.
struct ConstantOne {};

/// eps(t) = min(1, |log t|^{-s}).
struct PowerLog {
  double s = 1.0;
};

/// eps(t) = min(1, |log t|^{1-d} (log|log t|)^{-s}). `d` is the family's own
/// parameter and is independent of the gauge exponent.
struct IteratedLog {
  double d = 1.0;
  double s = 1.0;
};

/// Finite monotone table of (t, eps) pairs, interpolated linearly in log t.
/// The anchor (1, 1) is implied when the table stops short of t = 1.
struct Tabulated {
  std::vector<std::pair<double, double>> points;
};

using EpsFamily = std::variant<ConstantOne, PowerLog, IteratedLog, Tabulated>;

/// h(t) = t^d eps(t) with 0 < d <= 2 and eps nondecreasing with values in [0, 1].
///
/// For the logarithmic families eps is clamped to 1 on [1/e, infinity); the
/// formulas are only meaningful near t = 0 and the clamp keeps |log t| away
/// from its zero at t = 1.
class GaugeFunction {
 public:
  GaugeFunction(double d, EpsFamily family);

  /// Pure power gauge t^d.
  static GaugeFunction power(double d) { return GaugeFunction(d, ConstantOne{}); }

  double d() const noexcept { return d_; }
  const EpsFamily& family() const noexcept { return family_; }
  bool is_pure_power() const noexcept {
    return std::holds_alternative<ConstantOne>(family_);
  }

  /// eps(t) for t > 0.
  double eps(double t) const;

  /// eps(e^{-u}). Works for u far beyond the double range of t (u up to ~1e300),
  /// which the quadrature in log t relies on.
  double eps_at_log(double u) const;

  /// h(t) = t^d eps(t) for t > 0.
  double operator()(double t) const;

  /// Same gauge family with a different exponent.
  GaugeFunction with_exponent(double d) const { return GaugeFunction(d, family_); }

 private:
  double d_;
  EpsFamily family_;
};

/// h(t); throws DomainError for t <= 0.
double eval_h(const GaugeFunction& g, double t);

enum class Verdict { converges, diverges, inconclusive };

const char* to_string(Verdict v) noexcept;

/// Result of testing int_0^1 eps(t)^p dt/t.
struct DiniTest {
  double p = 0.0;
  Verdict verdict = Verdict::inconclusive;
  /// int_delta^1 eps^p dt/t on the final geometric grid.
  double partial_integral = 0.0;
  /// Bound (or estimate, for tables) of int_0^delta eps^p dt/t; +inf when it diverges.
  double tail_estimate = 0.0;
  /// delta = 2^{-octaves}.
  double octaves = 0.0;
};

/// Trapezoid rule in log t on the nodes t = 2^{-j}, j = 0..octaves, of
/// int_{2^{-octaves}}^1 eps(t)^p dt/t. For tabulated gauges the range stops at
/// the smallest tabulated t.
double dini_partial(const GaugeFunction& g, double p, double octaves);

/// Convergence test for int_0 eps(t)^p dt/t.
///
/// Closed-form verdicts, with u = log(1/t):
///  - constant one: int du diverges.
///  - power-log s: int u^{-ps} du converges iff p*s > 1.
///  - iterated-log (d', s): int u^{-p(d'-1)} (log u)^{-ps} du converges iff
///    p(d'-1) > 1, or p(d'-1) = 1 and p*s > 1.
///  - tabulated: converges if the table reaches eps = 0, otherwise inconclusive
///    with a tail estimate from a power fit of the last two table points.
///
/// The partial integral doubles its number of octaves from 16 until the
/// relative change drops below 1e-8 or 2000 octaves are reached.
DiniTest dini_integral(const GaugeFunction& g, double p);

}  // namespace qcdist
