#pragma once

// Inductive construction of the extremal Cantor-type set E, its image phi(E)
// and the composed radial-stretch map phi_N.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qcdist/gauge.hpp"
#include "qcdist/qc_maps.hpp"

namespace qcdist {

struct Disk {
  Complex center;
  double radius = 0.0;
};

/// m disjoint disks of common radius R inside the unit disk with c = m R^2.
struct Packing {
  std::vector<Complex> centers;
  double R = 0.0;
  double c = 0.0;
};

/// Relative gap kept between neighbouring lattice disks and between the disks
/// and the unit circle, so that children sit strictly inside their parents.
inline constexpr double kPackingGap = 1e-3;

/// Smallest disk count for which the lattice search reaches c > 1/2.
inline constexpr int kMinPackingCount = 3;

/// Deterministic hexagonal-lattice packing of m disks in the unit disk.
///
/// Three symmetric lattice placements are tried (a lattice point, a deep hole
/// or an edge midpoint at the origin); for each, R is maximised by bisection
/// subject to at least m lattice points p with |p| + R(1+gap) <= 1 at spacing
/// 2R(1+gap). The m points closest to the origin (ties broken by angle) of the
/// best placement are returned. Throws PackingError unless 1/2 < m R^2 < 1,
/// which first succeeds at m = 3.
Packing pack_disks(int m);

/// Which family of covering sums the sigma equation normalises.
///   source: m_1...m_N h(s_N) = 1
///   image:  m_1...m_N h(t_N) = 1 with h(t) = t eta(t)   (d = 1)
enum class Normalization { source, image };

const char* to_string(Normalization n) noexcept;

struct ConstructionLevel {
  int m = 0;
  double R = 0.0;
  double sigma = 0.0;
  double c = 0.0;
  std::vector<Complex> centers;
};

/// Level parameters and radii bookkeeping. Disk families are expanded lazily
/// from the per-level packings:
///   source centre of J = (j_1..j_N):  x_J = x_{J'} + s_{N-1} z^N_{j_N}, radius s_N
///   image centre of J:                y_J = y_{J'} + t_{N-1} z^N_{j_N}, radius t_N
/// with s_N = prod sigma_i^K R_i, t_N = prod sigma_i R_i. Multi-indices are
/// enumerated in lexicographic order, so the parent of disk i at level N is
/// disk i / m_N at level N-1.
class CantorTree {
 public:
  CantorTree(double K, GaugeFunction gauge, Normalization mode = Normalization::source);

  double K() const noexcept { return K_; }
  const GaugeFunction& gauge() const noexcept { return gauge_; }
  Normalization normalization() const noexcept { return mode_; }

  std::span<const ConstructionLevel> levels() const noexcept { return levels_; }
  std::size_t depth() const noexcept { return levels_.size(); }
  const ConstructionLevel& level(std::size_t N) const;  // 1-based

  /// s_N and t_N; N = 0 gives 1.
  double s(std::size_t N) const;
  double t(std::size_t N) const;
  /// m_1...m_N as a double (exact below 2^53).
  double count(std::size_t N) const;
  /// c_1...c_N
  double c_product(std::size_t N) const;

  /// Appends a finalised level; validates sigma, c and the disk radius.
  void push_level(ConstructionLevel level);

  /// Largest N whose cumulative number of disks sum_{n<=N} m_1...m_n stays within node_cap.
  std::size_t materializable_depth(std::size_t node_cap) const;

  std::vector<Disk> source_disks(std::size_t N) const;
  std::vector<Disk> image_disks(std::size_t N) const;

  /// g_N: stretches centred at the level-N image centres with outer radius
  /// t_{N-1} R_N and inner ratio sigma_N.
  MultiStretch stretch_layer(std::size_t N) const;
  /// phi_N = g_N o ... o g_1.
  ComposedQCMap composed_map(std::size_t N) const;

 private:
  std::vector<Complex> expand_centers(std::size_t N, bool image) const;

  double K_;
  GaugeFunction gauge_;
  Normalization mode_;
  std::vector<ConstructionLevel> levels_;
  std::vector<double> s_{1.0};
  std::vector<double> t_{1.0};
  std::vector<double> count_{1.0};
  std::vector<double> c_product_{1.0};
};

struct SigmaSolution {
  double sigma = 0.0;
  /// m_1...m_N h(.) - 1 at the returned sigma.
  double residual = 0.0;
  int iterations = 0;
  bool within_target = true;
  /// Estimated factor for m_N that brings sigma_N down to target_small (1 if within target).
  double m_multiplier = 1.0;
};

/// Solves m_1...m_N h(s_{N-1} sigma^K R_N) = 1 (or the image normalisation of
/// the tree) for sigma_N by bisection on (1e-15, 1 - 1e-15). Levels 1..N-1 of
/// `tree` are used; m_N and R_N are given. Throws InfeasibleError when the
/// equation has no root in (0, 1), PrecisionError when the residual stays above 1e-10.
SigmaSolution solve_sigma(const CantorTree& tree, std::size_t N, int m_N, double R_N,
                          double target_small = 1.0);

/// Image-side variant: solves m_1...m_N t_N eta(t_N) = 1, eta a d = 1 gauge.
SigmaSolution variant_solve_sigma_corollary(const CantorTree& tree, std::size_t N, int m_N,
                                            double R_N, const GaugeFunction& eta,
                                            double target_small = 1.0);

/// v(s_N) <= 2^{-N(1 - 1/K)} with v given by the eps of `v`.
bool shrink_rule_holds(const GaugeFunction& v, double s_N, std::size_t N, double K);

/// Default shrink function: eps of a power-log gauge with exponent
/// (s(1+1/K) - 1)/2 when the construction gauge is power-log with
/// s(1+1/K) > 1, and exponent 1 otherwise.
GaugeFunction default_shrink_function(const GaugeFunction& gauge, double K);

struct BuildOptions {
  Normalization normalization = Normalization::source;
  double target_small = 1.0;
  /// Grow m_N (by the solver's multiplier) when sigma_N misses target_small
  /// or the equation is infeasible; otherwise such a level is an error.
  bool grow_m = false;
  bool enforce_shrink_rule = false;
  std::optional<GaugeFunction> shrink_function;
  std::size_t node_cap = 10'000'000;
};

struct BuildResult {
  CantorTree tree;
  /// phi_D for D = min(depth, materializable depth).
  ComposedQCMap map;
  std::size_t materialized_depth = 0;
  bool truncated = false;
  std::string notice;
};

/// Runs the construction for the requested disk counts, one entry per level.
BuildResult build(double K, const GaugeFunction& gauge, std::span<const int> m_per_level,
                  const BuildOptions& options = {});

/// Measure applied to each disk: a gauge h or a power diam^t.
using CoveringMeasure = std::variant<GaugeFunction, double>;

enum class Side { source, image };
/// Size fed to the measure: 2 * radius (default) or the radius itself, which
/// is the convention of the normalisation equations.
enum class SizeConvention { diameter, radius };

const char* to_string(Side s) noexcept;

/// Sum over the level-N disks of h(size) or size^t. All level-N disks share
/// one radius, so the sum is (m_1...m_N) * measure(size).
double covering_sum(const CantorTree& tree, std::size_t N, const CoveringMeasure& measure,
                    Side side, SizeConvention size = SizeConvention::diameter);

/// eps'(t_N) = eps(s_N)^{(K+1)/2K} (c_1...c_N)^{(1-K)/2K}.
double epsilon_prime(const CantorTree& tree, std::size_t N);

/// eps' at the knots t_1 > ... > t_D, extended linearly in log t between knots.
class EpsilonPrime {
 public:
  explicit EpsilonPrime(const CantorTree& tree);

  std::span<const double> knots() const noexcept { return t_; }
  std::span<const double> values() const noexcept { return value_; }
  /// True when the knot values are nondecreasing in t.
  bool monotone() const noexcept;
  /// DomainError below the smallest knot; constant above the largest.
  double operator()(double t) const;

 private:
  std::vector<double> t_;
  std::vector<double> value_;
};

struct NormalizationRow {
  std::size_t N = 0;
  int m = 0;
  double R = 0.0;
  double sigma = 0.0;
  double c = 0.0;
  double s = 0.0;
  double t = 0.0;
  /// Residual of the tree's own sigma equation (source or image normalisation).
  double residual_equation = 0.0;
  /// m_1...m_N h(s_N) - 1
  double residual_source = 0.0;
  /// m_1...m_N t_N eps(s_N)^{(K+1)/2K} (c_1...c_N)^{(1-K)/2K} - 1
  double residual_image = 0.0;
  double eps_prime = 0.0;
  /// eps(s_N)^{1+1/K} 2^{N(1-1/K)}
  double shrink_bound = 0.0;
  bool shrink_bound_holds = false;
};

struct NormalizationReport {
  std::vector<NormalizationRow> rows;
  double max_abs_residual_equation = 0.0;
  double max_abs_residual_source = 0.0;
  double max_abs_residual_image = 0.0;
};

NormalizationReport normalization_report(const CantorTree& tree);

}  // namespace qcdist
