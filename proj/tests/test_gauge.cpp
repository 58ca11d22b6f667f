#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qcdist/errors.hpp"
#include "qcdist/gauge.hpp"

using namespace qcdist;

namespace {

// Plain transcription of eps for the log families, in long double.
long double ref_power_log(long double t, long double s) {
  const long double L = -std::log(t);
  return L <= 1.0L ? 1.0L : std::pow(L, -s);
}

long double ref_iterated_log(long double t, long double dd, long double s) {
  const long double L = -std::log(t);
  if (L <= 1.0L) return 1.0L;
  return std::min(1.0L, std::pow(L, 1.0L - dd) * std::pow(std::log(L), -s));
}

}  // namespace

TEST(Gauge, PurePowerValues) {
  EXPECT_DOUBLE_EQ(eval_h(GaugeFunction::power(1.0), 0.5), 0.5);
  EXPECT_NEAR(eval_h(GaugeFunction::power(2.0 / 3.0), 0.001), 1.0e-2, 1e-15);
}

TEST(Gauge, PowerLogAtExpMinusTen) {
  const GaugeFunction g(1.0, PowerLog{2.0});
  const double t = std::exp(-10.0);
  const long double expected = std::exp(-10.0L) / 100.0L;
  EXPECT_NEAR(g(t), static_cast<double>(expected), 1e-15 * 4.54e-7);
  EXPECT_NEAR(g(t), 4.54e-7, 1e-9);
}

TEST(Gauge, MatchesReferenceFormulas) {
  const GaugeFunction pl(0.7, PowerLog{1.3});
  const GaugeFunction il(0.7, IteratedLog{1.5, 0.8});
  for (int j = 1; j <= 60; ++j) {
    const double t = std::ldexp(1.0, -j);
    EXPECT_NEAR(pl.eps(t), static_cast<double>(ref_power_log(t, 1.3L)), 1e-14) << j;
    EXPECT_NEAR(il.eps(t), static_cast<double>(ref_iterated_log(t, 1.5L, 0.8L)), 1e-14) << j;
  }
}

TEST(Gauge, EpsIsOneAboveOneOverE) {
  for (const GaugeFunction& g : {GaugeFunction(1.0, PowerLog{3.0}), GaugeFunction(1.0, IteratedLog{2.0, 1.0})}) {
    EXPECT_EQ(g.eps(1.0 / std::numbers::e), 1.0);
    EXPECT_EQ(g.eps(0.9), 1.0);
    EXPECT_EQ(g.eps(1.0), 1.0);
    EXPECT_EQ(g.eps(5.0), 1.0);
    EXPECT_DOUBLE_EQ(g(3.0), 3.0);
  }
}

TEST(Gauge, RejectsNonpositiveArgument) {
  const auto g = GaugeFunction::power(1.0);
  EXPECT_THROW(eval_h(g, 0.0), DomainError);
  EXPECT_THROW(eval_h(g, -1.0), DomainError);
}

TEST(Gauge, RejectsBadParameters) {
  EXPECT_THROW(GaugeFunction(0.0, ConstantOne{}), DomainError);
  EXPECT_THROW(GaugeFunction(2.5, ConstantOne{}), DomainError);
  EXPECT_THROW(GaugeFunction(1.0, PowerLog{-1.0}), DomainError);
  EXPECT_THROW(GaugeFunction(1.0, IteratedLog{0.5, 1.0}), DomainError);
  EXPECT_THROW(GaugeFunction(1.0, Tabulated{{{0.5, 0.5}, {0.1, 0.2}}}), DomainError);
  EXPECT_THROW(GaugeFunction(1.0, Tabulated{{{0.1, 0.6}, {0.5, 0.5}}}), DomainError);
  EXPECT_THROW(GaugeFunction(1.0, Tabulated{{{0.1, 1.5}}}), DomainError);
}

TEST(Gauge, TabulatedInterpolatesInLogT) {
  const GaugeFunction g(1.0, Tabulated{{{1e-4, 0.2}, {1e-2, 0.6}}});
  EXPECT_DOUBLE_EQ(g.eps(1e-4), 0.2);
  EXPECT_DOUBLE_EQ(g.eps(1e-2), 0.6);
  EXPECT_NEAR(g.eps(1e-3), 0.4, 1e-14);
  // implied anchor (1, 1)
  EXPECT_NEAR(g.eps(1e-1), 0.8, 1e-14);
  EXPECT_DOUBLE_EQ(g.eps(1.0), 1.0);
  EXPECT_THROW(g.eps(1e-5), DomainError);
}

TEST(Gauge, LogFamiliesBeatEveryPower) {
  // t^alpha / eps(t) -> 0. The ratio falls once -log t exceeds s / alpha, here 40.
  for (const GaugeFunction& g : {GaugeFunction(1.0, PowerLog{2.0}), GaugeFunction(1.0, IteratedLog{1.5, 1.0})}) {
    for (double alpha : {0.05, 0.2, 1.0}) {
      double prev = INFINITY;
      for (int j = 100; j <= 1000; j += 100) {
        const double t = std::ldexp(1.0, -j);
        const double r = std::pow(t, alpha) / g.eps(t);
        EXPECT_LT(r, prev);
        prev = r;
      }
      EXPECT_LT(prev, 1.0);
    }
  }
}

TEST(Dini, ConstantOneDiverges) {
  const DiniTest r = dini_integral(GaugeFunction::power(1.0), 2.0);
  EXPECT_EQ(r.verdict, Verdict::diverges);
  EXPECT_TRUE(std::isinf(r.tail_estimate));
}

TEST(Dini, PowerLogExamples) {
  EXPECT_EQ(dini_integral(GaugeFunction(1.0, PowerLog{2.0}), 2.0).verdict, Verdict::converges);
  EXPECT_EQ(dini_integral(GaugeFunction(1.0, PowerLog{0.4}), 2.0).verdict, Verdict::diverges);
}

TEST(Dini, ConvergentPartialMatchesClosedForm) {
  // eps^p = u^{-4} for u >= 1 and 1 below: the integral is 1 + 1/3. The
  // octave trapezoid is coarse, so compare with an independently coded
  // trapezoid on the same nodes and loosely with the exact value.
  const GaugeFunction g(1.0, PowerLog{2.0});
  const DiniTest r = dini_integral(g, 2.0);
  const double h = std::log(2.0);
  auto f = [](double u) { return u <= 1.0 ? 1.0 : std::pow(u, -4.0); };
  double trap = 0.0;
  for (int j = 0; j < static_cast<int>(r.octaves); ++j) trap += 0.5 * h * (f(j * h) + f((j + 1) * h));
  EXPECT_NEAR(r.partial_integral, trap, 1e-12);
  EXPECT_NEAR(r.partial_integral + r.tail_estimate, 4.0 / 3.0, 0.05);
}

TEST(Dini, PartialsGrowAsDeltaShrinks) {
  for (const GaugeFunction& g : {GaugeFunction(1.0, PowerLog{0.7}), GaugeFunction(1.0, PowerLog{3.0}),
                                 GaugeFunction(1.0, IteratedLog{2.0, 0.5}), GaugeFunction::power(1.0)}) {
    double prev = 0.0;
    for (double oct : {1.0, 2.0, 5.0, 10.0, 40.0, 200.0, 1000.0}) {
      const double v = dini_partial(g, 1.5, oct);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Dini, IteratedLogRule) {
  // p(d'-1) > 1 converges regardless of s
  EXPECT_EQ(dini_integral(GaugeFunction(1.0, IteratedLog{2.5, 0.1}), 1.0).verdict, Verdict::converges);
  // p(d'-1) = 1: decided by p s
  EXPECT_EQ(dini_integral(GaugeFunction(1.0, IteratedLog{2.0, 2.0}), 1.0).verdict, Verdict::converges);
  EXPECT_EQ(dini_integral(GaugeFunction(1.0, IteratedLog{2.0, 0.5}), 1.0).verdict, Verdict::diverges);
  // p(d'-1) < 1 diverges
  EXPECT_EQ(dini_integral(GaugeFunction(1.0, IteratedLog{1.5, 5.0}), 1.0).verdict, Verdict::diverges);
}

TEST(Dini, TabulatedVerdicts) {
  const GaugeFunction zero(1.0, Tabulated{{{1e-6, 0.0}, {1e-2, 0.5}}});
  EXPECT_EQ(dini_integral(zero, 1.0).verdict, Verdict::converges);
  const GaugeFunction positive(1.0, Tabulated{{{1e-8, 0.05}, {1e-4, 0.1}, {1e-2, 0.5}}});
  const DiniTest r = dini_integral(positive, 1.0);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_GT(r.partial_integral, 0.0);
  // eps ~ u^{-1} with p = 1 is the borderline: no finite tail estimate.
  EXPECT_TRUE(std::isinf(r.tail_estimate));
  const DiniTest r3 = dini_integral(positive, 3.0);
  EXPECT_TRUE(std::isfinite(r3.tail_estimate));
  EXPECT_GT(r3.tail_estimate, 0.0);
}

TEST(Dini, RejectsNonpositiveP) { EXPECT_THROW(dini_integral(GaugeFunction::power(1.0), 0.0), DomainError); }
