#include "qcdist/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

#include "qcdist/errors.hpp"
#include "qcdist/parallel.hpp"

namespace qcdist {

double distortion(double t, double K) {
  if (!(t >= 0.0 && t <= 2.0)) throw DomainError("distortion: t must lie in [0, 2]");
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("distortion: K must be >= 1");
  // The critical exponent 2/(K+1) maps to 1; the general formula can be off by an ulp there.
  if (t == 2.0 / (K + 1.0)) return 1.0;
  return 2.0 * K * t / (2.0 + (K - 1.0) * t);
}

double distortion_inverse(double t_prime, double K) {
  if (!(t_prime >= 0.0 && t_prime <= 2.0))
    throw DomainError("distortion_inverse: t' must lie in [0, 2]");
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("distortion_inverse: K must be >= 1");
  if (t_prime == 1.0) return 2.0 / (K + 1.0);
  return 2.0 * t_prime / (2.0 * K - (K - 1.0) * t_prime);
}

const char* to_string(DimensionMethod m) noexcept {
  switch (m) {
    case DimensionMethod::box_counting:
      return "box_counting";
    case DimensionMethod::covering_sum_fit:
      return "covering_sum_fit";
    case DimensionMethod::similarity_closed_form:
      return "similarity_closed_form";
  }
  return "box_counting";
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

namespace {

std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(ix) << 32) ^ (static_cast<std::uint64_t>(iy) & 0xffffffffULL);
}

// Portable uniform double in [0, 1).
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <class CountAt>
DimensionReport box_fit(const BoxCountingOptions& opts, CountAt&& count_at) {
  if (opts.j_max - opts.j_min + 1 < 4) throw DomainError("box counting needs at least 4 scales");
  if (opts.j_min < -4 || opts.j_max > 40) throw DomainError("box counting scales out of range");
  if (opts.shifted_anchors < 0) throw DomainError("shifted_anchors must be nonnegative");

  const auto n_scales = static_cast<std::size_t>(opts.j_max - opts.j_min + 1);
  std::vector<Complex> anchors{Complex{0.0, 0.0}};
  std::mt19937_64 rng(opts.seed);
  for (int a = 0; a < opts.shifted_anchors; ++a) {
    const double u = unit_uniform(rng);
    const double v = unit_uniform(rng);
    anchors.emplace_back(u, v);
  }

  std::vector<double> counts(anchors.size() * n_scales);
  parallel_for(counts.size(), [&](std::size_t k) {
    const std::size_t a = k / n_scales;
    const int j = opts.j_min + static_cast<int>(k % n_scales);
    counts[k] = static_cast<double>(count_at(std::ldexp(1.0, -j), anchors[a]));
  });

  std::vector<double> x(n_scales);
  for (std::size_t i = 0; i < n_scales; ++i)
    x[i] = static_cast<double>(opts.j_min + static_cast<int>(i)) * std::log(2.0);

  auto fit_anchor = [&](std::size_t a) {
    std::vector<double> y(n_scales);
    for (std::size_t i = 0; i < n_scales; ++i) {
      const double c = counts[a * n_scales + i];
      if (!(c >= 1.0)) throw DomainError("box counting: empty set");
      y[i] = std::log(c);
    }
    return std::make_pair(fit_line(x, y), y);
  };

  DimensionReport rep;
  rep.method = DimensionMethod::box_counting;
  const auto [fit, y] = fit_anchor(0);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.fit_residual = fit.rms_residual;
  rep.fitted_dimension = std::clamp(fit.slope, 0.0, 2.0);
  for (std::size_t i = 0; i < n_scales; ++i)
    rep.scales.push_back({std::exp(-x[i]), counts[i], x[i], y[i], fit.intercept + fit.slope * x[i]});

  double lo = rep.fitted_dimension, hi = rep.fitted_dimension;
  for (std::size_t a = 1; a < anchors.size(); ++a) {
    const double d = std::clamp(fit_anchor(a).first.slope, 0.0, 2.0);
    rep.anchor_dimensions.push_back(d);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  rep.anchor_spread = hi - lo;
  return rep;
}

}  // namespace

DimensionReport box_dimension(std::span<const Complex> points, const BoxCountingOptions& opts) {
  if (points.empty()) throw DomainError("box counting: empty point set");
  return box_fit(opts, [&](double delta, Complex anchor) {
    std::unordered_set<std::uint64_t> cells;
    cells.reserve(points.size());
    for (const Complex& p : points) {
      const auto ix = static_cast<std::int64_t>(std::floor(p.real() / delta - anchor.real()));
      const auto iy = static_cast<std::int64_t>(std::floor(p.imag() / delta - anchor.imag()));
      cells.insert(cell_key(ix, iy));
    }
    return cells.size();
  });
}

DimensionReport box_dimension(std::span<const Disk> disks, const BoxCountingOptions& opts) {
  if (disks.empty()) throw DomainError("box counting: empty disk family");
  return box_fit(opts, [&](double delta, Complex anchor) {
    std::unordered_set<std::uint64_t> cells;
    cells.reserve(disks.size());
    constexpr double kMaxCells = 5e7;
    double visited = 0.0;
    for (const Disk& d : disks) {
      const double cx = d.center.real() / delta - anchor.real();
      const double cy = d.center.imag() / delta - anchor.imag();
      const double r = d.radius / delta;
      const auto x0 = static_cast<std::int64_t>(std::floor(cx - r));
      const auto x1 = static_cast<std::int64_t>(std::floor(cx + r));
      const auto y0 = static_cast<std::int64_t>(std::floor(cy - r));
      const auto y1 = static_cast<std::int64_t>(std::floor(cy + r));
      visited += static_cast<double>((x1 - x0 + 1) * (y1 - y0 + 1));
      if (visited > kMaxCells) throw DomainError("box counting: scale too fine for the disk family");
      for (auto ix = x0; ix <= x1; ++ix) {
        for (auto iy = y0; iy <= y1; ++iy) {
          const double nx = std::clamp(cx, static_cast<double>(ix), static_cast<double>(ix + 1));
          const double ny = std::clamp(cy, static_cast<double>(iy), static_cast<double>(iy + 1));
          if ((nx - cx) * (nx - cx) + (ny - cy) * (ny - cy) <= r * r) cells.insert(cell_key(ix, iy));
        }
      }
    }
    return cells.size();
  });
}

namespace {

double level_radius(const CantorTree& tree, Side side, std::size_t N) {
  return side == Side::source ? tree.s(N) : tree.t(N);
}

}  // namespace

DimensionReport content_sum_fit(const CantorTree& tree, Side side, double t) {
  if (tree.depth() < 4) throw DomainError("content_sum_fit: tree depth must be at least 4");
  if (!(t >= 0.0 && t <= 2.0)) throw DomainError("content_sum_fit: t must lie in [0, 2]");
  std::vector<double> x, y;
  DimensionReport rep;
  rep.method = DimensionMethod::covering_sum_fit;
  rep.exponent = t;
  for (std::size_t N = 1; N <= tree.depth(); ++N) {
    const double diam = 2.0 * level_radius(tree, side, N);
    const double sum = covering_sum(tree, N, t, side);
    x.push_back(-std::log(diam));
    y.push_back(std::log(sum));
    rep.scales.push_back({diam, sum, x.back(), y.back(), 0.0});
  }
  const LineFit fit = fit_line(x, y);
  for (auto& s : rep.scales) s.fit = fit.intercept + fit.slope * s.log_x;
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.fit_residual = fit.rms_residual;
  rep.decay_exponent = -fit.slope;
  rep.fitted_dimension = std::clamp(t + fit.slope, 0.0, 2.0);
  return rep;
}

std::pair<double, double> critical_exponent(const CantorTree& tree, Side side,
                                            std::span<const double> t_grid) {
  if (t_grid.size() < 2) throw DomainError("critical_exponent: grid needs two or more exponents");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("critical_exponent: grid must increase");
  double prev_slope = content_sum_fit(tree, side, t_grid[0]).slope;
  if (prev_slope <= 0.0) throw DomainError("critical_exponent: sums already decay at the first exponent");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double slope = content_sum_fit(tree, side, t_grid[i]).slope;
    if (slope <= 0.0) return {t_grid[i - 1], t_grid[i]};
    prev_slope = slope;
  }
  throw DomainError("critical_exponent: sums still grow at the last exponent");
}

DimensionReport similarity_dimension(const CantorTree& tree, Side side) {
  if (tree.depth() == 0) throw DomainError("similarity_dimension: empty tree");
  const std::size_t D = tree.depth();
  DimensionReport rep;
  rep.method = DimensionMethod::similarity_closed_form;
  const double dim = std::log(tree.count(D)) / -std::log(level_radius(tree, side, D));
  rep.fitted_dimension = std::clamp(dim, 0.0, 2.0);
  rep.slope = dim;
  for (std::size_t N = 1; N <= D; ++N) {
    const double r = level_radius(tree, side, N);
    rep.scales.push_back({r, tree.count(N), -std::log(r), std::log(tree.count(N)), -dim * std::log(r)});
  }
  return rep;
}

double image_dimension_slack(const CantorTree& tree) {
  if (tree.depth() == 0) throw DomainError("image_dimension_slack: empty tree");
  const std::size_t D = tree.depth();
  return std::abs(std::log(tree.c_product(D))) / -std::log(tree.t(D));
}

ContentInequalityReport verify_content_inequality(const CantorTree& tree) {
  const double K = tree.K();
  const double d = 2.0 / (K + 1.0);
  if (!tree.gauge().is_pure_power() || std::abs(tree.gauge().d() - d) > 1e-12)
    throw DomainError("verify_content_inequality: tree gauge must be t^{2/(K+1)}");
  if (tree.depth() == 0) throw DomainError("verify_content_inequality: empty tree");

  ContentInequalityReport rep;
  std::vector<double> x, xn, y;
  for (std::size_t N = 1; N <= tree.depth(); ++N) {
    ContentInequalityRow row;
    row.N = N;
    row.image_sum = covering_sum(tree, N, 1.0, Side::image);
    row.source_sum = covering_sum(tree, N, d, Side::source);
    row.ratio = row.image_sum / std::pow(row.source_sum, (K + 1.0) / (2.0 * K));
    rep.rows.push_back(row);
    x.push_back(-std::log(tree.t(N)));
    xn.push_back(static_cast<double>(N));
    y.push_back(std::log(row.ratio));
  }
  rep.max_ratio = rep.rows.front().ratio;
  rep.min_ratio = rep.rows.front().ratio;
  for (const auto& r : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    rep.min_ratio = std::min(rep.min_ratio, r.ratio);
  }
  rep.variation = rep.max_ratio / rep.min_ratio;
  if (rep.rows.size() >= 2) {
    rep.growth_exponent = fit_line(x, y).slope;
    rep.growth_per_level = fit_line(xn, y).slope;
  }
  return rep;
}

}  // namespace qcdist
