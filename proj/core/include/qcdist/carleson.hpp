#pragma once

// Boundary machinery on the unit disk: Carleson squares, good/bad index
// classification for boundary disk families, integral means and the bound
// calculators built on them.

#include <string>
#include <variant>
#include <vector>

#include "qcdist/qc_maps.hpp"

namespace qcdist {

/// Q_{j,k} = { 2^{-k} <= 1-|z| < 2^{-k+1},  2^{-k+1} pi j <= arg z < 2^{-k+1} pi (j+1) }
/// with arg in [0, 2pi). For fixed k the 2^k squares j = 0..2^k-1 tile the band.
struct CarlesonSquare {
  long long j = 0;
  int k = 1;

  friend bool operator==(const CarlesonSquare&, const CarlesonSquare&) = default;
};

/// The unique square containing z, 0 < |z| < 1.
CarlesonSquare carleson_square_of(Complex z);

/// Disks D(xi_i, r_i) centred on the unit circle; z_i = (1 - r_i) xi_i.
class BoundaryDiskFamily {
 public:
  struct Member {
    Complex xi;
    double r = 0.0;
  };

  BoundaryDiskFamily() = default;
  explicit BoundaryDiskFamily(std::vector<Member> members);

  /// 2^k disks of radius 2^{-k} centred at exp(2 pi i (j + 1/2) / 2^k).
  static BoundaryDiskFamily dyadic(int k);

  const std::vector<Member>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  Complex point(std::size_t i) const;

 private:
  std::vector<Member> members_;
};

/// Holomorphic test maps on the unit disk with closed-form derivatives.
namespace maps {
struct Identity {};
/// f'(z) = (1 - z)^{-b}
struct HalfPlanePower {
  double b = 1.0;
};
/// f(z) = z / (1 - z)^2
struct Koebe {};
/// f(z) = (z - a) / (1 - conj(a) z), |a| < 1
struct Mobius {
  Complex a;
};
/// f(z) = sum_k coefficients[k] z^k
struct Polynomial {
  std::vector<Complex> coefficients;
};
}  // namespace maps

class AnalyticTestMap {
 public:
  using Kind = std::variant<maps::Identity, maps::HalfPlanePower, maps::Koebe, maps::Mobius,
                            maps::Polynomial>;

  AnalyticTestMap(Kind kind = maps::Identity{});

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;
  Complex derivative(Complex z) const;

 private:
  Kind kind_;
};

struct IndexClassification {
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;
  /// Indices with |f'(z_i)| within 1% of the threshold (either side).
  std::vector<std::size_t> borderline;
  std::vector<double> derivative_modulus;
  std::vector<double> threshold;
};

/// i is good iff |f'(z_i)| <= (1 - |z_i|)^{alpha/delta - 1}. Requires 0 < alpha < delta < 1.
IndexClassification classify_indices(const BoundaryDiskFamily& family, const AnalyticTestMap& f,
                                     double alpha, double delta);

struct GoodSumCheck {
  /// sum over good i of (|f'(z_i)| (1 - |z_i|))^delta
  double lhs = 0.0;
  /// sum over good i of diam(D_i)^alpha with diam = 2 r_i
  double rhs = 0.0;
  /// lhs / rhs, or 0 when there are no good indices.
  double ratio = 0.0;
  std::size_t good_count = 0;
};

/// Compares image diameter sums over the good indices, with diam f(D_i)
/// replaced by |f'(z_i)| (1 - |z_i|), against the source sums.
GoodSumCheck good_sum_check(const BoundaryDiskFamily& family, const AnalyticTestMap& f,
                            double alpha, double delta);

/// int_0^{2 pi} |f'(r e^{it})|^p dt by the periodic trapezoid rule, doubling the
/// node count from 64 until the relative change drops below 1e-8. Throws
/// PrecisionError when 2^22 nodes are not enough.
double integral_means(const AnalyticTestMap& f, double p, double r);

struct BetaEstimate {
  double beta = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;
  bool low_confidence = false;
  std::vector<double> radii;
  std::vector<double> integrals;
};

/// Residual (rms, natural-log units) above which a beta fit is flagged.
inline constexpr double kBetaResidualThreshold = 0.05;

/// Least-squares slope of log int |f'|^p against log 1/(1-r) over r = 1 - 2^{-j},
/// j_min <= j <= j_max (at least 5 radii).
BetaEstimate beta_estimate(const AnalyticTestMap& f, double p, int j_min = 6, int j_max = 16);

/// q dim_A / (beta + q + 1 - dim_A); DomainError when the denominator is not positive.
double makarov_bound(double dim_A, double q, double beta_minus_q);

/// 9 ((K-1)/(K+1))^2 p^2
double pommerenke_bound(double K, double p);

/// p^2/4 ((K-1)/(K+1))^2, the conjectured sharp value for |p| <= 2(K+1)/(K-1).
double brennan_reference(double K, double p);

struct QuasicircleBounds {
  double becker_pommerenke = 1.0;  // 1 + 37 k^2
  double smirnov = 1.0;            // 1 + k^2
  double lower_reference = 1.0;    // 1 + 0.69 k^2
};

/// Dimension bounds for K-quasicircles with k = (K-1)/(K+1).
QuasicircleBounds quasicircle_bounds(double K);

/// Parameter schema alpha = 1 - M eps^2, delta = alpha (1 + N eps^2), gamma = M - N
/// for the bad-index estimate; valid when M > 400, 20 sqrt(M) < N < M, alpha > 0
/// and alpha < delta < 1 - gamma eps^2.
struct BadIndexParameters {
  double alpha = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  bool valid = false;
  std::string reason;
};

BadIndexParameters bad_index_parameters(double M, double N, double eps);

}  // namespace qcdist
