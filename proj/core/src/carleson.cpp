#include "qcdist/carleson.hpp"

#include <cmath>
#include <numbers>

#include "qcdist/dimension.hpp"
#include "qcdist/errors.hpp"

namespace qcdist {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kPi = std::numbers::pi;

}  // namespace

CarlesonSquare carleson_square_of(Complex z) {
  const double modulus = std::abs(z);
  if (!(modulus > 0.0 && modulus < 1.0))
    throw DomainError("carleson_square_of: requires 0 < |z| < 1");
  // 1 - |z| = f 2^e with f in [1/2, 1), so 1 - |z| lies in [2^{e-1}, 2^e) and k = 1 - e.
  int e = 0;
  std::frexp(1.0 - modulus, &e);
  const int k = 1 - e;

  double angle = std::arg(z);
  if (angle < 0.0) angle += 2.0 * kPi;
  const double width = std::ldexp(kPi, 1 - k);
  const long long count = 1LL << k;
  auto j = static_cast<long long>(std::floor(angle / width));
  if (j >= count) j = count - 1;  // arg just below 2 pi rounding up
  if (j < 0) j = 0;
  return {j, k};
}

// ---------------------------------------------------------------------------

BoundaryDiskFamily::BoundaryDiskFamily(std::vector<Member> members) : members_(std::move(members)) {
  for (const auto& m : members_) {
    if (std::abs(std::abs(m.xi) - 1.0) > 1e-12)
      throw DomainError("boundary disk centres must lie on the unit circle");
    if (!(m.r > 0.0 && m.r < 1.0)) throw DomainError("boundary disk radii must lie in (0, 1)");
  }
}

BoundaryDiskFamily BoundaryDiskFamily::dyadic(int k) {
  if (k < 1 || k > 24) throw DomainError("dyadic family: k must lie in [1, 24]");
  const long long n = 1LL << k;
  std::vector<Member> members;
  members.reserve(static_cast<std::size_t>(n));
  const double r = std::ldexp(1.0, -k);
  for (long long j = 0; j < n; ++j)
    members.push_back({std::polar(1.0, 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(n)), r});
  return BoundaryDiskFamily(std::move(members));
}

Complex BoundaryDiskFamily::point(std::size_t i) const {
  const auto& m = members_.at(i);
  return (1.0 - m.r) * m.xi;
}

// ---------------------------------------------------------------------------

AnalyticTestMap::AnalyticTestMap(Kind kind) : kind_(std::move(kind)) {
  if (const auto* mob = std::get_if<maps::Mobius>(&kind_); mob && !(std::abs(mob->a) < 1.0))
    throw DomainError("Mobius test map requires |a| < 1");
  if (const auto* pw = std::get_if<maps::HalfPlanePower>(&kind_); pw && !std::isfinite(pw->b))
    throw DomainError("power test map requires a finite exponent");
}

std::string AnalyticTestMap::name() const {
  return std::visit(Overloaded{
                        [](const maps::Identity&) { return std::string("identity"); },
                        [](const maps::HalfPlanePower&) { return std::string("power"); },
                        [](const maps::Koebe&) { return std::string("koebe"); },
                        [](const maps::Mobius&) { return std::string("mobius"); },
                        [](const maps::Polynomial&) { return std::string("polynomial"); },
                    },
                    kind_);
}

Complex AnalyticTestMap::derivative(Complex z) const {
  return std::visit(Overloaded{
                        [](const maps::Identity&) { return Complex{1.0, 0.0}; },
                        [z](const maps::HalfPlanePower& f) { return std::exp(-f.b * std::log(1.0 - z)); },
                        [z](const maps::Koebe&) {
                          const Complex w = 1.0 - z;
                          return (1.0 + z) / (w * w * w);
                        },
                        [z](const maps::Mobius& f) {
                          const Complex w = 1.0 - std::conj(f.a) * z;
                          return (1.0 - std::norm(f.a)) / (w * w);
                        },
                        [z](const maps::Polynomial& f) {
                          // Horner on sum_{k>=1} k a_k z^{k-1}.
                          Complex acc{0.0, 0.0};
                          for (std::size_t k = f.coefficients.size(); k-- > 1;)
                            acc = acc * z + static_cast<double>(k) * f.coefficients[k];
                          return acc;
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------

IndexClassification classify_indices(const BoundaryDiskFamily& family, const AnalyticTestMap& f,
                                     double alpha, double delta) {
  if (!(0.0 < alpha && alpha < delta && delta < 1.0))
    throw DomainError("classify_indices: requires 0 < alpha < delta < 1");
  IndexClassification out;
  const double exponent = alpha / delta - 1.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const Complex z = family.point(i);
    const double modulus = std::abs(f.derivative(z));
    const double threshold = std::pow(1.0 - std::abs(z), exponent);
    out.derivative_modulus.push_back(modulus);
    out.threshold.push_back(threshold);
    (modulus <= threshold ? out.good : out.bad).push_back(i);
    if (std::abs(modulus - threshold) <= 0.01 * threshold) out.borderline.push_back(i);
  }
  return out;
}

GoodSumCheck good_sum_check(const BoundaryDiskFamily& family, const AnalyticTestMap& f, double alpha,
                            double delta) {
  const IndexClassification cls = classify_indices(family, f, alpha, delta);
  GoodSumCheck out;
  out.good_count = cls.good.size();
  for (std::size_t i : cls.good) {
    const Complex z = family.point(i);
    out.lhs += std::pow(cls.derivative_modulus[i] * (1.0 - std::abs(z)), delta);
    out.rhs += std::pow(2.0 * family.members()[i].r, alpha);
  }
  out.ratio = out.good_count == 0 ? 0.0 : out.lhs / out.rhs;
  return out;
}

// ---------------------------------------------------------------------------

double integral_means(const AnalyticTestMap& f, double p, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("integral_means: r must lie in (0, 1)");
  auto g = [&](double t) { return std::pow(std::abs(f.derivative(std::polar(r, t))), p); };

  constexpr std::size_t kMaxNodes = std::size_t{1} << 22;
  std::size_t n = 64;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += g(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  double value = 2.0 * kPi * sum / static_cast<double>(n);
  while (n < kMaxNodes) {
    // The refined rule reuses the old nodes and adds the midpoints.
    double odd = 0.0;
    const std::size_t n2 = 2 * n;
    for (std::size_t k = 1; k < n2; k += 2)
      odd += g(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n2));
    sum += odd;
    n = n2;
    const double next = 2.0 * kPi * sum / static_cast<double>(n);
    const bool converged = std::abs(next - value) <= 1e-8 * std::abs(next);
    value = next;
    if (converged) return value;
  }
  throw PrecisionError("integral_means: no convergence with 2^22 nodes");
}

BetaEstimate beta_estimate(const AnalyticTestMap& f, double p, int j_min, int j_max) {
  if (j_min < 1 || j_max - j_min + 1 < 5)
    throw DomainError("beta_estimate: needs at least 5 radii 1 - 2^{-j} with j >= 1");
  BetaEstimate out;
  std::vector<double> x, y;
  for (int j = j_min; j <= j_max; ++j) {
    const double one_minus_r = std::ldexp(1.0, -j);
    const double r = 1.0 - one_minus_r;
    const double I = integral_means(f, p, r);
    out.radii.push_back(r);
    out.integrals.push_back(I);
    x.push_back(-std::log(one_minus_r));
    y.push_back(std::log(I));
  }
  const LineFit fit = fit_line(x, y);
  out.beta = fit.slope;
  out.intercept = fit.intercept;
  out.fit_residual = fit.rms_residual;
  out.low_confidence = fit.rms_residual > kBetaResidualThreshold;
  return out;
}

// ---------------------------------------------------------------------------

double makarov_bound(double dim_A, double q, double beta_minus_q) {
  if (!(dim_A > 0.0 && dim_A <= 1.0)) throw DomainError("makarov_bound: dim_A must lie in (0, 1]");
  if (!(q > 0.0)) throw DomainError("makarov_bound: q must be positive");
  if (!(beta_minus_q >= 0.0)) throw DomainError("makarov_bound: beta must be nonnegative");
  const double denom = beta_minus_q + q + 1.0 - dim_A;
  if (!(denom > 0.0)) throw DomainError("makarov_bound: nonpositive denominator");
  return q * dim_A / denom;
}

namespace {
double dilatation_ratio(double K) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("K must be >= 1");
  return (K - 1.0) / (K + 1.0);
}
}  // namespace

double pommerenke_bound(double K, double p) {
  const double k = dilatation_ratio(K);
  return 9.0 * k * k * p * p;
}

double brennan_reference(double K, double p) {
  const double k = dilatation_ratio(K);
  return 0.25 * p * p * k * k;
}

QuasicircleBounds quasicircle_bounds(double K) {
  const double k2 = dilatation_ratio(K) * dilatation_ratio(K);
  return {1.0 + 37.0 * k2, 1.0 + k2, 1.0 + 0.69 * k2};
}

BadIndexParameters bad_index_parameters(double M, double N, double eps) {
  BadIndexParameters out;
  out.alpha = 1.0 - M * eps * eps;
  out.delta = out.alpha * (1.0 + N * eps * eps);
  out.gamma = M - N;
  if (!(M > 400.0)) {
    out.reason = "M must exceed 400";
  } else if (!(20.0 * std::sqrt(M) < N && N < M)) {
    out.reason = "N must satisfy 20 sqrt(M) < N < M";
  } else if (!(eps > 0.0 && out.alpha > 0.0)) {
    out.reason = "alpha = 1 - M eps^2 must be positive";
  } else if (!(out.alpha < out.delta && out.delta < 1.0 - out.gamma * eps * eps)) {
    out.reason = "delta must satisfy alpha < delta < 1 - gamma eps^2";
  } else {
    out.valid = true;
  }
  return out;
}

}  // namespace qcdist
