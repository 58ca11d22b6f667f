#include "qcdist/qc_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcdist/errors.hpp"

namespace qcdist {

RadialStretch::RadialStretch(Complex center, double r, double sigma, double K)
    : center_(center), r_(r), sigma_(sigma), K_(K) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radial stretch: radius must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("radial stretch: sigma must lie in (0, 1)");
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("radial stretch: K must be >= 1");
  inner_ = std::pow(sigma, K) * r;
  inner_scale_ = std::pow(sigma, 1.0 - K);
}

Complex RadialStretch::operator()(Complex z) const noexcept {
  const Complex v = z - center_;
  const double rho = std::abs(v);
  if (rho <= inner_) return center_ + inner_scale_ * v;
  if (rho < r_) return center_ + std::pow(rho / r_, 1.0 / K_ - 1.0) * v;
  return z;
}

Complex RadialStretch::inverse(Complex w) const noexcept {
  const Complex v = w - center_;
  const double rho = std::abs(v);
  const double image_inner = sigma_ * r_;
  if (rho <= image_inner) return center_ + v / inner_scale_;
  if (rho < r_) return center_ + std::pow(rho / r_, K_ - 1.0) * v;
  return w;
}

Complex RadialStretch::beltrami(Complex z) const {
  const Complex v = z - center_;
  const double rho = std::abs(v);
  const double tol = 1e-12 * r_;
  if (std::abs(rho - inner_) <= tol || std::abs(rho - r_) <= tol)
    throw BoundaryError("Beltrami coefficient is undefined on an interface circle");
  if (rho < inner_ || rho > r_) return {0.0, 0.0};
  return (1.0 - K_) / (1.0 + K_) * (v / std::conj(v));
}

double RadialStretch::image_radius(double rho) const {
  if (!(rho >= inner_ * (1.0 - 1e-14) && rho <= r_ * (1.0 + 1e-14)))
    throw DomainError("image radius: rho must lie in [sigma^K r, r]");
  return std::pow(r_, 1.0 - 1.0 / K_) * std::pow(rho, 1.0 / K_);
}

Complex eval(const RadialStretch& m, Complex z) noexcept { return m(z); }
Complex eval_inverse(const RadialStretch& m, Complex w) noexcept { return m.inverse(w); }
Complex beltrami(const RadialStretch& m, Complex z) { return m.beltrami(z); }
double image_disk_concentric(const RadialStretch& m, double rho) { return m.image_radius(rho); }

Complex beltrami_fd(const RadialStretch& m, Complex z) {
  return finite_difference_beltrami(m, z, 1e-5 * m.r());
}

// ---------------------------------------------------------------------------

MultiStretch::MultiStretch(std::vector<RadialStretch> stretches) : stretches_(std::move(stretches)) {
  if (stretches_.size() > std::numeric_limits<std::uint32_t>::max())
    throw DomainError("multi-stretch: too many disks");
  double max_r = 0.0;
  for (const auto& s : stretches_) max_r = std::max(max_r, s.r());
  cell_ = max_r > 0.0 ? 2.0 * max_r : 1.0;

  grid_.reserve(stretches_.size());
  for (std::uint32_t i = 0; i < stretches_.size(); ++i)
    grid_[key(stretches_[i].center())].push_back(i);

  // Every disk meets only disks whose centers are in the 3x3 block of cells.
  for (std::uint32_t i = 0; i < stretches_.size(); ++i) {
    const auto& a = stretches_[i];
    visit_near(a.center(), [&](std::uint32_t j) {
      if (j <= i) return false;
      const auto& b = stretches_[j];
      if (std::abs(a.center() - b.center()) < (a.r() + b.r()) * (1.0 - 1e-12))
        throw DomainError("multi-stretch: outer disks " + std::to_string(i) + " and " +
                          std::to_string(j) + " overlap");
      return false;
    });
  }
}

std::int64_t MultiStretch::key(Complex z) const noexcept {
  const auto ix = static_cast<std::int64_t>(std::floor(z.real() / cell_));
  const auto iy = static_cast<std::int64_t>(std::floor(z.imag() / cell_));
  return (ix << 32) ^ (iy & 0xffffffffLL);
}

template <class Visit>
bool MultiStretch::visit_near(Complex z, Visit&& visit) const {
  const double cx = std::floor(z.real() / cell_);
  const double cy = std::floor(z.imag() / cell_);
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const Complex probe((cx + dx + 0.5) * cell_, (cy + dy + 0.5) * cell_);
      const auto it = grid_.find(key(probe));
      if (it == grid_.end()) continue;
      for (std::uint32_t j : it->second)
        if (visit(j)) return true;
    }
  }
  return false;
}

const RadialStretch* MultiStretch::find(Complex z) const noexcept {
  if (stretches_.empty()) return nullptr;
  const RadialStretch* found = nullptr;
  visit_near(z, [&](std::uint32_t j) {
    if (!stretches_[j].contains(z)) return false;
    found = &stretches_[j];
    return true;
  });
  return found;
}

Complex MultiStretch::operator()(Complex z) const noexcept {
  const RadialStretch* s = find(z);
  return s ? (*s)(z) : z;
}

Complex MultiStretch::inverse(Complex w) const noexcept {
  // Each outer disk is mapped onto itself.
  const RadialStretch* s = find(w);
  return s ? s->inverse(w) : w;
}

Complex MultiStretch::beltrami(Complex z) const {
  const RadialStretch* s = find(z);
  if (s) return s->beltrami(z);
  const bool on_circle = visit_near(z, [&](std::uint32_t j) {
    const auto& st = stretches_[j];
    return std::abs(std::abs(z - st.center()) - st.r()) <= 1e-12 * st.r();
  });
  if (on_circle) throw BoundaryError("Beltrami coefficient is undefined on an interface circle");
  return {0.0, 0.0};
}

// ---------------------------------------------------------------------------

Complex ComposedQCMap::operator()(Complex z) const noexcept {
  for (const auto& layer : layers_) z = layer(z);
  return z;
}

Complex ComposedQCMap::inverse(Complex w) const noexcept {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) w = it->inverse(w);
  return w;
}

Complex eval_composed(const ComposedQCMap& phi, Complex z) noexcept { return phi(z); }

}  // namespace qcdist
