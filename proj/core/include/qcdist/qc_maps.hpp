#pragma once

// Piecewise radial stretches and their compositions.

#include <complex>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace qcdist {

using Complex = std::complex<double>;

/// The K-quasiconformal building block supported on D = D(center, r):
///
///   w = center + sigma^{1-K} (z - center)             |z - center| <= sigma^K r
///   w = center + |(z - center)/r|^{1/K-1} (z - center) sigma^K r < |z - center| < r
///   w = z                                             otherwise
///
/// D is mapped onto itself, the inner disk D(center, sigma^K r) onto
/// D(center, sigma r). Points exactly on the inner interface circle use the
/// scaling branch; continuity makes the choice value-irrelevant.
class RadialStretch {
 public:
  RadialStretch(Complex center, double r, double sigma, double K);

  Complex center() const noexcept { return center_; }
  double r() const noexcept { return r_; }
  double sigma() const noexcept { return sigma_; }
  double K() const noexcept { return K_; }

  /// sigma^K r
  double inner_radius() const noexcept { return inner_; }
  /// sigma r, radius of the image of the inner disk.
  double image_inner_radius() const noexcept { return sigma_ * r_; }

  bool contains(Complex z) const noexcept { return std::abs(z - center_) < r_; }

  Complex operator()(Complex z) const noexcept;
  Complex inverse(Complex w) const noexcept;

  /// Closed-form Beltrami coefficient. In the annulus
  /// mu = (1-K)/(1+K) * (z-c)/conj(z-c); zero elsewhere.
  /// Throws BoundaryError within 1e-12 r of either interface circle.
  Complex beltrami(Complex z) const;

  /// Radius of the image of D(center, rho), sigma^K r <= rho <= r.
  double image_radius(double rho) const;

 private:
  Complex center_;
  double r_;
  double sigma_;
  double K_;
  double inner_;
  double inner_scale_;  // sigma^{1-K}
};

Complex eval(const RadialStretch& m, Complex z) noexcept;
Complex eval_inverse(const RadialStretch& m, Complex w) noexcept;
Complex beltrami(const RadialStretch& m, Complex z);
/// r^{1-1/K} rho^{1/K}; DomainError outside [sigma^K r, r].
double image_disk_concentric(const RadialStretch& m, double rho);

/// Central-difference Beltrami coefficient of `f` at z with step h:
/// mu = (f_x + i f_y) / (f_x - i f_y).
template <class Map>
Complex finite_difference_beltrami(const Map& f, Complex z, double h) {
  const Complex dx = (f(z + Complex(h, 0.0)) - f(z - Complex(h, 0.0))) / (2.0 * h);
  const Complex dy = (f(z + Complex(0.0, h)) - f(z - Complex(0.0, h))) / (2.0 * h);
  const Complex i(0.0, 1.0);
  const Complex dz = 0.5 * (dx - i * dy);
  const Complex dzbar = 0.5 * (dx + i * dy);
  return dzbar / dz;
}

/// Finite-difference Beltrami coefficient with step 1e-5 * r.
Complex beltrami_fd(const RadialStretch& m, Complex z);

/// Radial stretches with pairwise disjoint outer disks acting simultaneously.
/// The containing disk is located through a uniform grid with cells of side
/// 2 * max radius keyed on the disk centers.
class MultiStretch {
 public:
  MultiStretch() = default;
  explicit MultiStretch(std::vector<RadialStretch> stretches);

  std::span<const RadialStretch> stretches() const noexcept { return stretches_; }
  std::size_t size() const noexcept { return stretches_.size(); }

  /// Stretch whose open outer disk contains z, or nullptr.
  const RadialStretch* find(Complex z) const noexcept;

  Complex operator()(Complex z) const noexcept;
  Complex inverse(Complex w) const noexcept;
  Complex beltrami(Complex z) const;

 private:
  std::int64_t key(Complex z) const noexcept;
  // Calls visit(index) for disks keyed in the 3x3 cells around z; stops on true.
  template <class Visit>
  bool visit_near(Complex z, Visit&& visit) const;

  std::vector<RadialStretch> stretches_;
  double cell_ = 1.0;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> grid_;
};

/// phi_N = g_N o ... o g_1, layer n holding g_n.
class ComposedQCMap {
 public:
  ComposedQCMap() = default;
  explicit ComposedQCMap(std::vector<MultiStretch> layers) : layers_(std::move(layers)) {}

  void push_back(MultiStretch layer) { layers_.push_back(std::move(layer)); }

  std::span<const MultiStretch> layers() const noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }

  Complex operator()(Complex z) const noexcept;
  Complex inverse(Complex w) const noexcept;

 private:
  std::vector<MultiStretch> layers_;
};

Complex eval_composed(const ComposedQCMap& phi, Complex z) noexcept;

}  // namespace qcdist
