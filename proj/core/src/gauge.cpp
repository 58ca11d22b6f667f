#include "qcdist/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcdist/errors.hpp"

namespace qcdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const Tabulated& tab) {
  if (tab.points.empty()) throw DomainError("tabulated gauge: empty table");
  double prev_t = 0.0;
  double prev_eps = 0.0;
  for (const auto& [t, e] : tab.points) {
    if (!(t > prev_t) || t > 1.0)
      throw DomainError("tabulated gauge: t values must be strictly increasing in (0, 1]");
    if (!(e >= 0.0 && e <= 1.0))
      throw DomainError("tabulated gauge: eps values must lie in [0, 1]");
    if (e < prev_eps) throw DomainError("tabulated gauge: eps must be nondecreasing");
    prev_t = t;
    prev_eps = e;
  }
  if (tab.points.back().first == 1.0 && tab.points.back().second != 1.0)
    throw DomainError("tabulated gauge: eps(1) must equal 1");
}

// Linear interpolation in log t; u = -log t.
double tabulated_eps(const Tabulated& tab, double u) {
  const auto& pts = tab.points;
  const double u_min_t = -std::log(pts.front().first);
  if (u > u_min_t * (1.0 + 1e-14) + 1e-300)
    throw DomainError("tabulated gauge: no extrapolation below the smallest tabulated t");
  // Segments walk from t = 1 (u = 0) down to the smallest t.
  double u_hi = 0.0;
  double e_hi = 1.0;
  if (pts.back().first == 1.0) {
    u_hi = 0.0;
    e_hi = pts.back().second;
  }
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    const double u_lo = -std::log(it->first);
    const double e_lo = it->second;
    if (u <= u_lo) {
      if (u_lo == u_hi) return e_lo;
      const double w = (u - u_hi) / (u_lo - u_hi);
      return e_hi + w * (e_lo - e_hi);
    }
    u_hi = u_lo;
    e_hi = e_lo;
  }
  return pts.front().second;
}

}  // namespace

GaugeFunction::GaugeFunction(double d, EpsFamily family) : d_(d), family_(std::move(family)) {
  if (!(d > 0.0 && d <= 2.0)) throw DomainError("gauge exponent d must satisfy 0 < d <= 2");
  std::visit(Overloaded{
                 [](const ConstantOne&) {},
                 [](const PowerLog& f) {
                   if (!(f.s >= 0.0) || !std::isfinite(f.s))
                     throw DomainError("power-log gauge requires s >= 0");
                 },
                 [](const IteratedLog& f) {
                   // eps is nondecreasing in t only when the |log t|^{1-d} factor
                   // does not grow as t -> 0.
                   if (!(f.d >= 1.0) || !std::isfinite(f.d))
                     throw DomainError("iterated-log gauge requires family d >= 1");
                   if (!(f.s > 0.0) || !std::isfinite(f.s))
                     throw DomainError("iterated-log gauge requires s > 0");
                 },
                 [](const Tabulated& f) { validate(f); },
             },
             family_);
}

double GaugeFunction::eps_at_log(double u) const {
  if (u <= 0.0) return 1.0;
  return std::visit(Overloaded{
                        [](const ConstantOne&) { return 1.0; },
                        [u](const PowerLog& f) {
                          if (u <= 1.0) return 1.0;
                          return std::pow(u, -f.s);
                        },
                        [u](const IteratedLog& f) {
                          if (u <= 1.0) return 1.0;
                          const double lf = (1.0 - f.d) * std::log(u) - f.s * std::log(std::log(u));
                          return lf >= 0.0 ? 1.0 : std::exp(lf);
                        },
                        [u](const Tabulated& f) { return tabulated_eps(f, u); },
                    },
                    family_);
}

double GaugeFunction::eps(double t) const {
  if (!(t > 0.0)) throw DomainError("eps(t) requires t > 0");
  if (t >= 1.0) return 1.0;
  return eps_at_log(-std::log(t));
}

double GaugeFunction::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("h(t) requires t > 0");
  return std::pow(t, d_) * eps(t);
}

double eval_h(const GaugeFunction& g, double t) { return g(t); }

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::converges:
      return "converges";
    case Verdict::diverges:
      return "diverges";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Upper end of the integration range in u = log(1/t).
double integration_limit(const GaugeFunction& g, double octaves) {
  double u_end = octaves * kLn2;
  if (const auto* tab = std::get_if<Tabulated>(&g.family()))
    u_end = std::min(u_end, -std::log(tab->points.front().first));
  return u_end;
}

}  // namespace

double dini_partial(const GaugeFunction& g, double p, double octaves) {
  if (!(p > 0.0)) throw DomainError("Dini exponent p must be positive");
  if (!(octaves >= 0.0)) throw DomainError("octaves must be nonnegative");
  const double u_end = integration_limit(g, octaves);
  double sum = 0.0;
  double u_prev = 0.0;
  double f_prev = std::pow(g.eps_at_log(0.0), p);
  for (long j = 1;; ++j) {
    const double u = std::min(static_cast<double>(j) * kLn2, u_end);
    if (u <= u_prev) break;
    const double f = std::pow(g.eps_at_log(u), p);
    sum += 0.5 * (f + f_prev) * (u - u_prev);
    u_prev = u;
    f_prev = f;
  }
  return sum;
}

DiniTest dini_integral(const GaugeFunction& g, double p) {
  if (!(p > 0.0)) throw DomainError("Dini exponent p must be positive");

  DiniTest out;
  out.p = p;

  double octaves = 16.0;
  double value = dini_partial(g, p, octaves);
  while (octaves < 2000.0) {
    const double next_octaves = std::min(2.0 * octaves, 2000.0);
    const double next = dini_partial(g, p, next_octaves);
    const double change = std::abs(next - value);
    octaves = next_octaves;
    value = next;
    if (change <= 1e-8 * std::abs(value)) break;
  }
  out.partial_integral = value;
  out.octaves = octaves;

  const double U = integration_limit(g, octaves);

  std::visit(
      Overloaded{
          [&](const ConstantOne&) {
            out.verdict = Verdict::diverges;
            out.tail_estimate = kInf;
          },
          [&](const PowerLog& f) {
            const double a = p * f.s;
            if (a > 1.0) {
              out.verdict = Verdict::converges;
              out.tail_estimate = std::pow(U, 1.0 - a) / (a - 1.0);
            } else {
              out.verdict = Verdict::diverges;
              out.tail_estimate = kInf;
            }
          },
          [&](const IteratedLog& f) {
            const double a = p * (f.d - 1.0);
            const double b = p * f.s;
            const double lnU = std::log(U);
            if (a > 1.0 + 1e-12) {
              out.verdict = Verdict::converges;
              out.tail_estimate = std::pow(lnU, -b) * std::pow(U, 1.0 - a) / (a - 1.0);
            } else if (std::abs(a - 1.0) <= 1e-12 && b > 1.0) {
              out.verdict = Verdict::converges;
              out.tail_estimate = std::pow(lnU, 1.0 - b) / (b - 1.0);
            } else {
              out.verdict = Verdict::diverges;
              out.tail_estimate = kInf;
            }
          },
          [&](const Tabulated& f) {
            const auto& pts = f.points;
            if (pts.front().second == 0.0) {
              out.verdict = Verdict::converges;
              out.tail_estimate = 0.0;
              return;
            }
            out.verdict = Verdict::inconclusive;
            // Power fit eps ~ C u^{-a} through the two smallest-t entries.
            if (pts.size() < 2) {
              out.tail_estimate = kInf;
              return;
            }
            const double u0 = -std::log(pts[0].first);
            const double u1 = -std::log(pts[1].first);
            if (!(u1 > 0.0) || pts[1].second <= 0.0) {
              out.tail_estimate = kInf;
              return;
            }
            const double a = std::log(pts[1].second / pts[0].second) / std::log(u0 / u1);
            if (!(a * p > 1.0)) {
              out.tail_estimate = kInf;
              return;
            }
            const double C = pts[0].second * std::pow(u0, a);
            out.tail_estimate = std::pow(C, p) * std::pow(u0, 1.0 - a * p) / (a * p - 1.0);
          },
      },
      g.family());

  return out;
}

}  // namespace qcdist
