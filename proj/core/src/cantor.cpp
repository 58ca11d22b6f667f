#include "qcdist/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qcdist/errors.hpp"

namespace qcdist {

const char* to_string(Normalization n) noexcept {
  return n == Normalization::source ? "source" : "image";
}

const char* to_string(Side s) noexcept { return s == Side::source ? "source" : "image"; }

// ---------------------------------------------------------------------------
// CantorTree

CantorTree::CantorTree(double K, GaugeFunction gauge, Normalization mode)
    : K_(K), gauge_(std::move(gauge)), mode_(mode) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("construction requires K >= 1");
  if (mode_ == Normalization::image && gauge_.d() != 1.0)
    throw DomainError("image normalisation requires a gauge with d = 1");
}

const ConstructionLevel& CantorTree::level(std::size_t N) const {
  if (N == 0 || N > levels_.size())
    throw DomainError("level " + std::to_string(N) + " is not built (depth " +
                      std::to_string(levels_.size()) + ")");
  return levels_[N - 1];
}

namespace {

std::size_t checked_index(std::size_t N, std::size_t depth) {
  if (N > depth)
    throw DomainError("level " + std::to_string(N) + " is beyond the built depth " +
                      std::to_string(depth));
  return N;
}

void check_disjoint_inside(const ConstructionLevel& lvl) {
  const double R = lvl.R;
  for (const Complex& z : lvl.centers)
    if (std::abs(z) + R > 1.0) throw DomainError("level disk leaves the unit disk");
  std::vector<Complex> pts = lvl.centers;
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size() && pts[j].real() - pts[i].real() < 2.0 * R; ++j) {
      if (std::abs(pts[i] - pts[j]) < 2.0 * R)
        throw DomainError("level disks overlap");
    }
  }
}

}  // namespace

double CantorTree::s(std::size_t N) const { return s_[checked_index(N, depth())]; }
double CantorTree::t(std::size_t N) const { return t_[checked_index(N, depth())]; }
double CantorTree::count(std::size_t N) const { return count_[checked_index(N, depth())]; }
double CantorTree::c_product(std::size_t N) const {
  return c_product_[checked_index(N, depth())];
}

void CantorTree::push_level(ConstructionLevel lvl) {
  if (lvl.m < 1) throw DomainError("level needs at least one disk");
  if (lvl.centers.size() != static_cast<std::size_t>(lvl.m))
    throw DomainError("level centre count does not match m");
  if (!(lvl.R > 0.0 && lvl.R < 1.0)) throw DomainError("level radius must lie in (0, 1)");
  if (!(lvl.sigma > 0.0 && lvl.sigma < 1.0)) throw DomainError("sigma must lie in (0, 1)");
  const double c = static_cast<double>(lvl.m) * lvl.R * lvl.R;
  if (std::abs(c - lvl.c) > 1e-12 * std::max(1.0, c))
    throw DomainError("level density c must equal m R^2");
  if (!(c > 0.5 && c < 1.0)) throw DomainError("level density c must lie in (1/2, 1)");
  check_disjoint_inside(lvl);

  s_.push_back(s_.back() * std::pow(lvl.sigma, K_) * lvl.R);
  t_.push_back(t_.back() * lvl.sigma * lvl.R);
  count_.push_back(count_.back() * static_cast<double>(lvl.m));
  c_product_.push_back(c_product_.back() * c);
  levels_.push_back(std::move(lvl));
}

std::size_t CantorTree::materializable_depth(std::size_t node_cap) const {
  double total = 0.0;
  std::size_t N = 0;
  while (N < depth()) {
    total += count_[N + 1];
    if (total > static_cast<double>(node_cap)) break;
    ++N;
  }
  return N;
}

std::vector<Complex> CantorTree::expand_centers(std::size_t N, bool image) const {
  checked_index(N, depth());
  std::vector<Complex> current{Complex{0.0, 0.0}};
  for (std::size_t n = 1; n <= N; ++n) {
    const auto& lvl = levels_[n - 1];
    const double scale = image ? t_[n - 1] : s_[n - 1];
    std::vector<Complex> next;
    next.reserve(current.size() * lvl.centers.size());
    for (const Complex& parent : current)
      for (const Complex& z : lvl.centers) next.push_back(parent + scale * z);
    current = std::move(next);
  }
  return current;
}

std::vector<Disk> CantorTree::source_disks(std::size_t N) const {
  const auto centers = expand_centers(N, false);
  std::vector<Disk> out;
  out.reserve(centers.size());
  for (const Complex& z : centers) out.push_back({z, s_[N]});
  return out;
}

std::vector<Disk> CantorTree::image_disks(std::size_t N) const {
  const auto centers = expand_centers(N, true);
  std::vector<Disk> out;
  out.reserve(centers.size());
  for (const Complex& z : centers) out.push_back({z, t_[N]});
  return out;
}

MultiStretch CantorTree::stretch_layer(std::size_t N) const {
  const auto& lvl = level(N);
  const double r = t_[N - 1] * lvl.R;
  std::vector<RadialStretch> stretches;
  for (const Complex& z : expand_centers(N, true)) stretches.emplace_back(z, r, lvl.sigma, K_);
  return MultiStretch(std::move(stretches));
}

ComposedQCMap CantorTree::composed_map(std::size_t N) const {
  checked_index(N, depth());
  ComposedQCMap phi;
  for (std::size_t n = 1; n <= N; ++n) phi.push_back(stretch_layer(n));
  return phi;
}

// ---------------------------------------------------------------------------
// sigma equations

namespace {

constexpr double kSigmaLo = 1e-15;
constexpr double kSigmaHi = 1.0 - 1e-15;
constexpr double kResidualTol = 1e-10;

SigmaSolution solve_normalization(const CantorTree& tree, std::size_t N, int m_N, double R_N,
                                  const GaugeFunction& h, bool image_side, double target_small) {
  if (N == 0 || tree.depth() + 1 < N)
    throw DomainError("solve_sigma: levels 1..N-1 must be built");
  if (m_N < 1) throw DomainError("solve_sigma: m_N must be positive");
  if (!(R_N > 0.0 && R_N < 1.0)) throw DomainError("solve_sigma: R_N must lie in (0, 1)");
  if (!(target_small > 0.0 && target_small <= 1.0))
    throw DomainError("solve_sigma: target_small must lie in (0, 1]");

  const double K = tree.K();
  const double M = tree.count(N - 1) * static_cast<double>(m_N);
  const double base = (image_side ? tree.t(N - 1) : tree.s(N - 1)) * R_N;
  auto size = [&](double sigma) { return base * (image_side ? sigma : std::pow(sigma, K)); };
  auto f = [&](double sigma) { return M * h(size(sigma)) - 1.0; };

  // M h(base) is the supremum of M h(size(sigma)) over sigma < 1.
  const double at_one = M * h(base);
  if (f(kSigmaHi) <= 0.0)
    throw InfeasibleError("level " + std::to_string(N) + ": m_1...m_N h(.) = 1 has no root in (0, 1)"
                              " (m_N = " + std::to_string(m_N) + " is too small)",
                          1.0 / at_one);

  double lo = kSigmaLo;
  double hi = kSigmaHi;
  if (f(lo) > 0.0)
    throw PrecisionError("level " + std::to_string(N) + ": sigma root lies below 1e-15");

  SigmaSolution sol;
  for (; sol.iterations < 200; ++sol.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    (fm > 0.0 ? hi : lo) = mid;
  }
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  sol.sigma = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  sol.residual = std::abs(f_lo) <= std::abs(f_hi) ? f_lo : f_hi;
  if (!(std::abs(sol.residual) <= kResidualTol))
    throw PrecisionError("level " + std::to_string(N) + ": sigma residual " +
                         std::to_string(sol.residual) + " exceeds 1e-10");

  sol.within_target = sol.sigma <= target_small;
  if (!sol.within_target) {
    // sigma_N scales like m_N^{-(1/d - 1/2)/K} (source side, R_N ~ m_N^{-1/2})
    // and like m_N^{-1/2} on the image side.
    const double rate = image_side ? 0.5 : (1.0 / h.d() - 0.5) / K;
    sol.m_multiplier = rate > 0.0 ? std::pow(sol.sigma / target_small, 1.0 / rate)
                                  : std::numeric_limits<double>::infinity();
  }
  return sol;
}

}  // namespace

SigmaSolution solve_sigma(const CantorTree& tree, std::size_t N, int m_N, double R_N,
                          double target_small) {
  const bool image = tree.normalization() == Normalization::image;
  return solve_normalization(tree, N, m_N, R_N, tree.gauge(), image, target_small);
}

SigmaSolution variant_solve_sigma_corollary(const CantorTree& tree, std::size_t N, int m_N,
                                            double R_N, const GaugeFunction& eta,
                                            double target_small) {
  if (eta.d() != 1.0) throw DomainError("image-side normalisation requires h(t) = t eta(t)");
  return solve_normalization(tree, N, m_N, R_N, eta, true, target_small);
}

bool shrink_rule_holds(const GaugeFunction& v, double s_N, std::size_t N, double K) {
  const double bound = std::exp2(-static_cast<double>(N) * (1.0 - 1.0 / K));
  return v.eps(s_N) <= bound;
}

GaugeFunction default_shrink_function(const GaugeFunction& gauge, double K) {
  double exponent = 1.0;
  if (const auto* pl = std::get_if<PowerLog>(&gauge.family())) {
    const double a = pl->s * (1.0 + 1.0 / K);
    if (a > 1.0) exponent = 0.5 * (a - 1.0);
  }
  return GaugeFunction(1.0, PowerLog{exponent});
}

// ---------------------------------------------------------------------------
// build

BuildResult build(double K, const GaugeFunction& gauge, std::span<const int> m_per_level,
                  const BuildOptions& options) {
  if (m_per_level.empty()) throw DomainError("build: at least one level is required");
  CantorTree tree(K, gauge, options.normalization);
  const GaugeFunction shrink_v =
      options.shrink_function ? *options.shrink_function : default_shrink_function(gauge, K);
  constexpr int kMaxAttempts = 64;
  constexpr double kMaxDisks = 1e8;

  for (std::size_t N = 1; N <= m_per_level.size(); ++N) {
    double m = m_per_level[N - 1];
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
      if (m > kMaxDisks)
        throw InfeasibleError("level " + std::to_string(N) + ": disk count grew beyond 1e8",
                              m / m_per_level[N - 1]);
      const int mi = static_cast<int>(m);
      Packing pk = pack_disks(mi);
      SigmaSolution sol;
      try {
        sol = solve_sigma(tree, N, mi, pk.R, options.target_small);
      } catch (const InfeasibleError& e) {
        if (!options.grow_m) throw;
        m = std::ceil(m * std::max(1.05 * e.required_multiplier(), 1.25));
        continue;
      }
      if (!sol.within_target) {
        if (!options.grow_m)
          throw InfeasibleError("level " + std::to_string(N) + ": sigma = " +
                                    std::to_string(sol.sigma) + " exceeds target_small; increase m_" +
                                    std::to_string(N) + " by about " +
                                    std::to_string(sol.m_multiplier),
                                sol.m_multiplier);
        m = std::ceil(m * std::max(sol.m_multiplier, 1.1));
        continue;
      }
      const double s_N = tree.s(N - 1) * std::pow(sol.sigma, K) * pk.R;
      if (options.enforce_shrink_rule && !shrink_rule_holds(shrink_v, s_N, N, K)) {
        m = std::ceil(m * 1.5);
        continue;
      }
      tree.push_level(ConstructionLevel{mi, pk.R, sol.sigma, pk.c, std::move(pk.centers)});
      accepted = true;
    }
    if (!accepted)
      throw InfeasibleError("level " + std::to_string(N) + ": no admissible disk count found",
                            m / m_per_level[N - 1]);
  }

  BuildResult result{std::move(tree), {}, 0, false, {}};
  const std::size_t D = result.tree.materializable_depth(options.node_cap);
  result.materialized_depth = D;
  result.truncated = D < result.tree.depth();
  if (result.truncated)
    result.notice = "node cap " + std::to_string(options.node_cap) +
                    " reached: disk families and the composed map are materialised to level " +
                    std::to_string(D) + " of " + std::to_string(result.tree.depth());
  if (D > 0) result.map = result.tree.composed_map(D);
  return result;
}

// ---------------------------------------------------------------------------
// sums and eps'

double covering_sum(const CantorTree& tree, std::size_t N, const CoveringMeasure& measure,
                    Side side, SizeConvention size) {
  if (N > tree.depth())
    throw DomainError("covering_sum: level " + std::to_string(N) + " is beyond the built depth");
  const double radius = side == Side::source ? tree.s(N) : tree.t(N);
  const double x = size == SizeConvention::diameter ? 2.0 * radius : radius;
  double per_disk = 0.0;
  if (const auto* g = std::get_if<GaugeFunction>(&measure)) {
    per_disk = (*g)(x);
  } else {
    const double t = std::get<double>(measure);
    if (!(t >= 0.0)) throw DomainError("covering_sum: exponent must be nonnegative");
    per_disk = t == 0.0 ? 1.0 : std::pow(x, t);
  }
  return tree.count(N) * per_disk;
}

double epsilon_prime(const CantorTree& tree, std::size_t N) {
  if (N == 0 || N > tree.depth())
    throw DomainError("epsilon_prime: level " + std::to_string(N) + " is not built");
  const double K = tree.K();
  return std::pow(tree.gauge().eps(tree.s(N)), (K + 1.0) / (2.0 * K)) *
         std::pow(tree.c_product(N), (1.0 - K) / (2.0 * K));
}

EpsilonPrime::EpsilonPrime(const CantorTree& tree) {
  if (tree.depth() == 0) throw DomainError("epsilon_prime: empty tree");
  for (std::size_t N = 1; N <= tree.depth(); ++N) {
    t_.push_back(tree.t(N));
    value_.push_back(epsilon_prime(tree, N));
  }
}

bool EpsilonPrime::monotone() const noexcept {
  // Knots are ordered by decreasing t.
  for (std::size_t i = 1; i < value_.size(); ++i)
    if (value_[i] > value_[i - 1]) return false;
  return true;
}

double EpsilonPrime::operator()(double t) const {
  if (t >= t_.front()) return value_.front();
  if (t < t_.back() * (1.0 - 1e-14)) throw DomainError("eps' is only defined down to t_D");
  for (std::size_t i = 1; i < t_.size(); ++i) {
    if (t >= t_[i]) {
      const double w = (std::log(t) - std::log(t_[i - 1])) / (std::log(t_[i]) - std::log(t_[i - 1]));
      return value_[i - 1] + w * (value_[i] - value_[i - 1]);
    }
  }
  return value_.back();
}

NormalizationReport normalization_report(const CantorTree& tree) {
  NormalizationReport rep;
  const double K = tree.K();
  const auto& g = tree.gauge();
  for (std::size_t N = 1; N <= tree.depth(); ++N) {
    const auto& lvl = tree.level(N);
    NormalizationRow row;
    row.N = N;
    row.m = lvl.m;
    row.R = lvl.R;
    row.sigma = lvl.sigma;
    row.c = lvl.c;
    row.s = tree.s(N);
    row.t = tree.t(N);
    const double M = tree.count(N);
    row.residual_source = M * g(row.s) - 1.0;
    row.residual_image = M * row.t * std::pow(g.eps(row.s), (K + 1.0) / (2.0 * K)) *
                             std::pow(tree.c_product(N), (1.0 - K) / (2.0 * K)) -
                         1.0;
    row.residual_equation =
        tree.normalization() == Normalization::source ? row.residual_source : M * g(row.t) - 1.0;
    row.eps_prime = epsilon_prime(tree, N);
    row.shrink_bound = std::pow(g.eps(row.s), 1.0 + 1.0 / K) *
                       std::exp2(static_cast<double>(N) * (1.0 - 1.0 / K));
    row.shrink_bound_holds = row.eps_prime * row.eps_prime <= row.shrink_bound * (1.0 + 1e-12);
    rep.max_abs_residual_equation =
        std::max(rep.max_abs_residual_equation, std::abs(row.residual_equation));
    rep.max_abs_residual_source = std::max(rep.max_abs_residual_source, std::abs(row.residual_source));
    rep.max_abs_residual_image = std::max(rep.max_abs_residual_image, std::abs(row.residual_image));
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace qcdist
