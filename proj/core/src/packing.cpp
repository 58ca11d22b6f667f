#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qcdist/cantor.hpp"
#include "qcdist/errors.hpp"

namespace qcdist {

namespace {

const Complex kE1{1.0, 0.0};
const Complex kE2{0.5, std::numbers::sqrt3 / 2.0};

// Lattice placements, in units of the lattice spacing.
const std::array<Complex, 3> kOffsets = {
    Complex{0.0, 0.0},                                   // lattice point
    (kE1 + kE2) / 3.0,                                   // deep hole
    0.5 * kE1,                                           // edge midpoint
};

// Lattice points p with |p| <= limit for spacing a; stops early once `stop_at` are found.
template <class Sink>
void for_each_point(double a, Complex offset, double limit, Sink&& sink) {
  if (limit < 0.0) return;
  const int n = static_cast<int>(std::ceil(limit / (a * std::numbers::sqrt3 / 2.0))) + 2;
  for (int j = -n; j <= n; ++j) {
    for (int i = -n - std::abs(j); i <= n + std::abs(j); ++i) {
      const Complex p = a * (offset + static_cast<double>(i) * kE1 + static_cast<double>(j) * kE2);
      if (std::abs(p) <= limit) sink(p);
    }
  }
}

std::size_t count_points(double R, Complex offset) {
  const double a = 2.0 * R * (1.0 + kPackingGap);
  const double limit = 1.0 - R * (1.0 + kPackingGap);
  std::size_t count = 0;
  for_each_point(a, offset, limit, [&](Complex) { ++count; });
  return count;
}

// Largest R with at least m admissible lattice points for this placement.
double max_radius(int m, Complex offset) {
  double lo = 0.0;
  double hi = 1.0 / (1.0 + kPackingGap);
  if (count_points(hi, offset) >= static_cast<std::size_t>(m)) return hi;
  // Lower bracket: area bound gives R <= 1/sqrt(m); shrink until feasible.
  lo = 0.5 / std::sqrt(static_cast<double>(m));
  while (count_points(lo, offset) < static_cast<std::size_t>(m)) lo *= 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_points(mid, offset) >= static_cast<std::size_t>(m))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

Packing pack_disks(int m) {
  if (m < 2) throw PackingError("pack_disks: at least 2 disks are required");

  double best_R = -1.0;
  Complex best_offset;
  for (const Complex& offset : kOffsets) {
    const double R = max_radius(m, offset);
    if (R > best_R) {
      best_R = R;
      best_offset = offset;
    }
  }

  const double R = best_R;
  const double c = static_cast<double>(m) * R * R;
  if (!(c > 0.5 && c < 1.0))
    throw PackingError("pack_disks: lattice search reaches only c = " + std::to_string(c) +
                       " for m = " + std::to_string(m) + " (needs c > 1/2; minimum m is " +
                       std::to_string(kMinPackingCount) + ")");

  std::vector<Complex> points;
  const double a = 2.0 * R * (1.0 + kPackingGap);
  for_each_point(a, best_offset, 1.0 - R * (1.0 + kPackingGap),
                 [&](Complex p) { points.push_back(p); });
  auto angle = [](Complex p) {
    const double t = std::arg(p);
    return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
  };
  // Distances are compared on a 1e-9 grid so lattice shells tie exactly.
  auto shell = [](Complex p) { return std::llround(std::abs(p) * 1e9); };
  std::sort(points.begin(), points.end(), [&](Complex p, Complex q) {
    const auto sp = shell(p);
    const auto sq = shell(q);
    if (sp != sq) return sp < sq;
    return angle(p) < angle(q);
  });
  points.resize(static_cast<std::size_t>(m));

  return Packing{std::move(points), R, c};
}

}  // namespace qcdist
