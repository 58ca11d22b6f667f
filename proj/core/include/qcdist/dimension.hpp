#pragma once

// Dimension distortion formula, box counting and covering-sum estimators.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qcdist/cantor.hpp"

namespace qcdist {

/// t' = 2Kt / (2 + (K-1)t), the extremal image dimension of a t-dimensional
/// set under a K-quasiconformal map. Requires 0 <= t <= 2, K >= 1.
double distortion(double t, double K);

/// Inverse of distortion(., K): t = 2t' / (2K - (K-1)t'), which is the same
/// formula with K replaced by 1/K.
double distortion_inverse(double t_prime, double K);

enum class DimensionMethod { box_counting, covering_sum_fit, similarity_closed_form };

const char* to_string(DimensionMethod m) noexcept;

struct ScaleSample {
  double scale = 0.0;   // delta, or the covering diameter of a level
  double value = 0.0;   // box count or covering sum
  double log_x = 0.0;   // log(1/scale)
  double log_y = 0.0;   // log(value)
  double fit = 0.0;     // fitted log_y
};

struct DimensionReport {
  DimensionMethod method = DimensionMethod::box_counting;
  std::vector<ScaleSample> scales;
  /// Clamped to [0, 2].
  double fitted_dimension = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double fit_residual = 0.0;
  /// Box counting: dimensions measured with randomly shifted grid anchors.
  std::vector<double> anchor_dimensions;
  double anchor_spread = 0.0;
  /// Covering-sum fits: the exponent t the sums were taken at and the decay
  /// exponent -slope of the sums against log(1/diam).
  double exponent = 0.0;
  double decay_exponent = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct BoxCountingOptions {
  /// Dyadic scales delta = 2^{-j}, j_min <= j <= j_max; at least 4 scales.
  int j_min = 1;
  int j_max = 8;
  /// Additional grids with anchors shifted by a uniform random fraction of delta.
  int shifted_anchors = 4;
  std::uint64_t seed = 0;
};

/// Least-squares slope of log N(delta) against log(1/delta), with grids
/// anchored at the origin. Throws DomainError on fewer than 4 scales or an
/// empty set.
DimensionReport box_dimension(std::span<const Complex> points, const BoxCountingOptions& opts);

/// Same with N(delta) the number of grid boxes meeting the union of disks.
DimensionReport box_dimension(std::span<const Disk> disks, const BoxCountingOptions& opts);

/// Level covering sums S_N = sum diam^t for N = 1..depth, fitted as
/// log S_N = a - (decay) log(1/diam_N). The estimated dimension is t - decay,
/// the exponent at which the sums stop growing or decaying. Requires depth >= 4.
DimensionReport content_sum_fit(const CantorTree& tree, Side side, double t);

/// Adjacent pair of grid exponents between which the fitted decay changes sign
/// (sums grow at the first, do not grow at the second).
std::pair<double, double> critical_exponent(const CantorTree& tree, Side side,
                                            std::span<const double> t_grid);

/// log(m_1...m_D) / log(1/radius_D), exact for self-similar trees.
DimensionReport similarity_dimension(const CantorTree& tree, Side side);

/// |log(c_1...c_D)| / log(1/t_D). For the critical power gauge the image
/// similarity dimension differs from 1 by at most this amount, since
/// log(m_1...m_D t_D) = (K-1)/(2K) log(c_1...c_D).
double image_dimension_slack(const CantorTree& tree);

struct ContentInequalityRow {
  std::size_t N = 0;
  double image_sum = 0.0;   // sum diam(image disk)^1
  double source_sum = 0.0;  // sum diam(source disk)^{2/(K+1)}
  double ratio = 0.0;       // image_sum / source_sum^{(K+1)/2K}
};

struct ContentInequalityReport {
  std::vector<ContentInequalityRow> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  /// max_ratio / min_ratio
  double variation = 0.0;
  /// Slope of log ratio against log(1/t_N).
  double growth_exponent = 0.0;
  /// Slope of log ratio against N.
  double growth_per_level = 0.0;
};

/// Level-by-level ratio M^1(image) / (M^{2/(K+1)}(source))^{(K+1)/2K} of the
/// construction's own coverings. Requires the pure power gauge with d = 2/(K+1).
ContentInequalityReport verify_content_inequality(const CantorTree& tree);

}  // namespace qcdist
