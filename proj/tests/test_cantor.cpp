#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qcdist/cantor.hpp"
#include "qcdist/errors.hpp"

using namespace qcdist;

namespace {

void expect_disjoint_inside(const std::vector<Complex>& z, double R) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_LE(std::abs(z[i]) + R, 1.0);
    for (std::size_t j = i + 1; j < z.size(); ++j) EXPECT_GE(std::abs(z[i] - z[j]), 2.0 * R);
  }
}

void expect_pairwise_disjoint(const std::vector<Disk>& d) {
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      ASSERT_GT(std::abs(d[i].center - d[j].center), d[i].radius + d[j].radius) << i << ' ' << j;
}

BuildResult regular_tree(double K, int m, int levels) {
  const std::vector<int> ms(static_cast<std::size_t>(levels), m);
  return build(K, GaugeFunction::power(2.0 / (K + 1.0)), ms);
}

}  // namespace

TEST(Packing, SmallCountsAreRejected) {
  EXPECT_THROW(pack_disks(0), PackingError);
  EXPECT_THROW(pack_disks(1), PackingError);
  // Two disjoint disks inside the unit disk have R <= 1/2, so c <= 1/2.
  EXPECT_THROW(pack_disks(2), PackingError);
}

TEST(Packing, ValidForManyCounts) {
  for (int m : {3, 4, 5, 7, 12, 19, 37, 64, 100, 200, 300, 1000}) {
    const Packing p = pack_disks(m);
    ASSERT_EQ(p.centers.size(), static_cast<std::size_t>(m));
    EXPECT_DOUBLE_EQ(p.c, m * p.R * p.R);
    EXPECT_GT(p.c, 0.5) << m;
    EXPECT_LT(p.c, 1.0) << m;
    expect_disjoint_inside(p.centers, p.R);
  }
}

TEST(Packing, TwoHundredDisks) {
  const Packing p = pack_disks(200);
  EXPECT_GT(p.R, 0.04);
  EXPECT_LT(p.R, 0.07);
}

TEST(Packing, Deterministic) {
  const Packing a = pack_disks(57), b = pack_disks(57);
  EXPECT_EQ(a.R, b.R);
  EXPECT_EQ(a.centers, b.centers);
}

TEST(SigmaSolver, ClosedFormOneLevel) {
  const CantorTree tree(3.0, GaugeFunction::power(0.5));
  const SigmaSolution sol = solve_sigma(tree, 1, 300, 0.05);
  const double expected = std::cbrt(1.0 / (300.0 * 300.0) / 0.05);
  EXPECT_NEAR(sol.sigma, expected, 1e-12);
  EXPECT_NEAR(sol.sigma, 0.0606, 5e-4);
  EXPECT_LE(std::abs(sol.residual), 1e-10);
}

TEST(SigmaSolver, ConformalUnitDensityIsInfeasible) {
  const CantorTree tree(1.0, GaugeFunction::power(1.0));
  EXPECT_THROW(solve_sigma(tree, 1, 4, 0.25), InfeasibleError);
}

TEST(SigmaSolver, SecondLevelClosedForm) {
  const double K = 2.0, d = 2.0 / 3.0;
  const int ms[] = {7};
  const BuildResult r = build(K, GaugeFunction::power(d), ms);
  const Packing p2 = pack_disks(19);
  const SigmaSolution sol = solve_sigma(r.tree, 2, 19, p2.R);
  const double expected = std::pow(std::pow(7.0 * 19.0, -1.0 / d) / (r.tree.s(1) * p2.R), 1.0 / K);
  EXPECT_NEAR(sol.sigma, expected, 1e-10);
}

TEST(SigmaSolver, MissedTargetReportsMultiplier) {
  const CantorTree tree(2.0, GaugeFunction::power(2.0 / 3.0));
  const Packing p = pack_disks(7);
  const SigmaSolution sol = solve_sigma(tree, 1, 7, p.R, 0.1);
  EXPECT_FALSE(sol.within_target);
  EXPECT_GT(sol.m_multiplier, 1.0);
  // Growing m by the estimate lands near the target.
  const int m2 = static_cast<int>(std::ceil(7 * sol.m_multiplier));
  const Packing p2 = pack_disks(m2);
  const SigmaSolution sol2 = solve_sigma(tree, 1, m2, p2.R, 0.1);
  EXPECT_LT(sol2.sigma, 0.13);
}

TEST(SigmaSolver, ImageSideNormalisation) {
  const CantorTree tree(2.0, GaugeFunction::power(2.0 / 3.0));
  const SigmaSolution one = variant_solve_sigma_corollary(tree, 1, 300, 0.05, GaugeFunction::power(1.0));
  EXPECT_NEAR(one.sigma, 1.0 / 15.0, 1e-12);
  const SigmaSolution gen = variant_solve_sigma_corollary(tree, 1, 10, 0.25, GaugeFunction::power(1.0));
  EXPECT_NEAR(gen.sigma, 1.0 / 2.5, 1e-12);

  const GaugeFunction eta(1.0, PowerLog{2.0});
  const SigmaSolution pl = variant_solve_sigma_corollary(tree, 1, 300, 0.05, eta);
  EXPECT_LE(std::abs(pl.residual), 1e-10);
  auto f = [&](double s) { return 300.0 * eta(0.05 * s) - 1.0; };
  EXPECT_LT(f(pl.sigma * (1.0 - 1e-6)), 0.0);
  EXPECT_GT(f(pl.sigma * (1.0 + 1e-6)), 0.0);
  EXPECT_THROW(variant_solve_sigma_corollary(tree, 1, 300, 0.05, GaugeFunction::power(0.5)), DomainError);
}

TEST(Build, OneLevelIsASimilarity) {
  const int ms[] = {3};
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms);
  const auto& lv = r.tree.level(1);
  const auto src = r.tree.source_disks(1);
  const auto img = r.tree.image_disks(1);
  ASSERT_EQ(src.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(src[i].center, lv.centers[i]);
    EXPECT_EQ(img[i].center, lv.centers[i]);
    EXPECT_DOUBLE_EQ(src[i].radius, std::pow(lv.sigma, 2.0) * lv.R);
    EXPECT_DOUBLE_EQ(img[i].radius, lv.sigma * lv.R);
  }
}

TEST(Build, RegularRadiiProducts) {
  const BuildResult r = regular_tree(2.0, 7, 3);
  const auto& lv = r.tree.level(1);
  EXPECT_NEAR(r.tree.s(3), std::pow(lv.sigma * lv.sigma * lv.R, 3), 1e-15);
  EXPECT_NEAR(r.tree.t(3), std::pow(lv.sigma * lv.R, 3), 1e-15);
  for (std::size_t N = 1; N <= 3; ++N) {
    const auto& l = r.tree.level(N);
    EXPECT_NEAR(r.tree.s(N) / r.tree.s(N - 1), std::pow(l.sigma, 2.0) * l.R, 1e-15);
    EXPECT_NEAR(r.tree.t(N) / r.tree.t(N - 1), l.sigma * l.R, 1e-15);
    EXPECT_LT(r.tree.s(N), r.tree.s(N - 1));
    EXPECT_LE(r.tree.s(N), r.tree.t(N));
  }
}

TEST(Build, DisjointAndNested) {
  const int ms[] = {7, 4, 5};
  const BuildResult r = build(1.5, GaugeFunction::power(0.8), ms);
  for (std::size_t N = 1; N <= 3; ++N) {
    for (bool image : {false, true}) {
      const auto cur = image ? r.tree.image_disks(N) : r.tree.source_disks(N);
      expect_pairwise_disjoint(cur);
      if (N == 1) continue;
      const auto parent = image ? r.tree.image_disks(N - 1) : r.tree.source_disks(N - 1);
      const auto m = static_cast<std::size_t>(r.tree.level(N).m);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const Disk& p = parent[i / m];
        EXPECT_LT(std::abs(cur[i].center - p.center) + cur[i].radius, p.radius);
      }
    }
  }
}

TEST(Build, ComposedMapSendsSourceCirclesToImageCircles) {
  for (double K : {1.5, 2.0, 3.0}) {
    const BuildResult r = regular_tree(K, 7, 2);
    ASSERT_EQ(r.materialized_depth, 2u);
    const auto src = r.tree.source_disks(2);
    const auto img = r.tree.image_disks(2);
    const auto& l = r.tree.level(1);
    const double t2 = l.sigma * l.R * l.sigma * l.R;
    for (std::size_t i = 0; i < src.size(); ++i) {
      for (int a = 0; a < 8; ++a) {
        const Complex z = src[i].center + std::polar(src[i].radius, 0.1 + a * 0.785);
        EXPECT_NEAR(std::abs(r.map(z) - img[i].center), t2, 1e-9);
      }
    }
  }
}

TEST(Build, NodeCapTruncatesMaterialisation) {
  const std::vector<int> ms(4, 7);
  BuildOptions o;
  o.node_cap = 400;  // 7 + 49 + 343 = 399
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms, o);
  EXPECT_EQ(r.tree.depth(), 4u);
  EXPECT_EQ(r.materialized_depth, 3u);
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.notice.empty());
  EXPECT_EQ(r.map.depth(), 3u);
}

TEST(Build, GrowsCountsToReachTarget) {
  const std::vector<int> ms(2, 7);
  BuildOptions o;
  o.target_small = 0.1;
  EXPECT_THROW(build(2.0, GaugeFunction::power(2.0 / 3.0), ms, o), InfeasibleError);
  o.grow_m = true;
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms, o);
  for (const auto& lv : r.tree.levels()) EXPECT_LE(lv.sigma, 0.1);
  EXPECT_GT(r.tree.level(1).m, 7);
}

TEST(Build, KEqualOneTreesCoincide) {
  const int ms[] = {7, 7};
  BuildOptions o;
  o.normalization = Normalization::image;
  const BuildResult r = build(1.0, GaugeFunction::power(1.0), ms, o);
  const auto a = r.tree.source_disks(2), b = r.tree.image_disks(2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].center, b[i].center);
    EXPECT_EQ(a[i].radius, b[i].radius);
  }
  EXPECT_LE(normalization_report(r.tree).max_abs_residual_equation, 1e-10);
}

TEST(CoveringSum, OwnGaugeSumsToOneWithRadiusConvention) {
  const int ms[] = {7, 12, 19, 7};
  const GaugeFunction g(2.0 / 3.0, PowerLog{1.0});
  const BuildResult r = build(2.0, g, ms);
  for (std::size_t N = 1; N <= 4; ++N)
    EXPECT_NEAR(covering_sum(r.tree, N, g, Side::source, SizeConvention::radius), 1.0, 1e-8);
  EXPECT_THROW(covering_sum(r.tree, 5, g, Side::source), DomainError);
}

TEST(CoveringSum, ZeroExponentCountsDisks) {
  const BuildResult r = regular_tree(2.0, 7, 3);
  for (Side side : {Side::source, Side::image}) EXPECT_DOUBLE_EQ(covering_sum(r.tree, 3, 0.0, side), 343.0);
}

TEST(CoveringSum, ImageLengthMatchesDensityProduct) {
  const double K = 2.0;
  const BuildResult r = regular_tree(K, 19, 5);
  const double c = r.tree.level(1).c;
  for (std::size_t N = 1; N <= 5; ++N) {
    const double expected = 2.0 * std::pow(std::pow(c, static_cast<double>(N)), (K - 1.0) / (2.0 * K));
    EXPECT_NEAR(covering_sum(r.tree, N, 1.0, Side::image), expected, 1e-10 * expected);
  }
}

TEST(EpsilonPrime, ConformalCaseIsEps) {
  const GaugeFunction g(1.0, PowerLog{0.5});
  const int ms[] = {7, 7, 7};
  BuildOptions o;
  o.normalization = Normalization::image;
  const BuildResult r = build(1.0, g, ms, o);
  for (std::size_t N = 1; N <= 3; ++N) EXPECT_NEAR(epsilon_prime(r.tree, N), g.eps(r.tree.s(N)), 1e-15);
}

TEST(EpsilonPrime, ConstantEpsGivesInverseDensityPower) {
  // c_i < 1 and (1-K)/2K < 0, so the value is >= 1 and grows with N.
  const double K = 2.0;
  const BuildResult r = regular_tree(K, 7, 4);
  double prev = 1.0;
  for (std::size_t N = 1; N <= 4; ++N) {
    const double v = epsilon_prime(r.tree, N);
    EXPECT_NEAR(v, std::pow(r.tree.c_product(N), (1.0 - K) / (2.0 * K)), 1e-15);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(EpsilonPrime, InterpolatesBetweenKnots) {
  const GaugeFunction g(2.0 / 3.0, PowerLog{2.0});
  const std::vector<int> ms(4, 19);
  const BuildResult r = build(2.0, g, ms);
  const EpsilonPrime ep(r.tree);
  ASSERT_EQ(ep.knots().size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(ep(ep.knots()[i]), ep.values()[i]);
  const double mid = std::sqrt(ep.knots()[0] * ep.knots()[1]);
  EXPECT_NEAR(ep(mid), 0.5 * (ep.values()[0] + ep.values()[1]), 1e-14);
  EXPECT_THROW(ep(ep.knots().back() * 0.5), DomainError);
}

TEST(ShrinkRule, EnforcedConstructionSatisfiesBound) {
  const double K = 2.0;
  const GaugeFunction g(2.0 / (K + 1.0), PowerLog{2.0});
  const std::vector<int> ms(5, 7);
  BuildOptions o;
  o.enforce_shrink_rule = true;
  o.node_cap = 1;
  const BuildResult r = build(K, g, ms, o);
  const GaugeFunction v = default_shrink_function(g, K);
  for (const auto& row : normalization_report(r.tree).rows) {
    EXPECT_TRUE(shrink_rule_holds(v, row.s, row.N, K));
    const double lhs = row.eps_prime * row.eps_prime;
    const double rhs = std::pow(g.eps(row.s), 1.0 + 1.0 / K) * std::exp2(row.N * (1.0 - 1.0 / K));
    EXPECT_LE(lhs, rhs) << row.N;
    EXPECT_TRUE(row.shrink_bound_holds);
  }
}

TEST(Normalization, ReportResiduals) {
  const GaugeFunction g(2.0 / 3.0, PowerLog{0.5});
  const std::vector<int> ms(4, 12);
  const BuildResult r = build(2.0, g, ms);
  const NormalizationReport rep = normalization_report(r.tree);
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_LE(rep.max_abs_residual_equation, 1e-10);
  EXPECT_LE(rep.max_abs_residual_source, 1e-10);
  for (const auto& row : rep.rows) {
    const double direct = r.tree.count(row.N) * g(row.s) - 1.0;
    EXPECT_NEAR(row.residual_source, direct, 1e-15);
    const double image = r.tree.count(row.N) * row.t * row.eps_prime - 1.0;
    EXPECT_NEAR(row.residual_image, image, 1e-12);
  }
}

TEST(CantorTree, PushLevelValidates) {
  CantorTree tree(2.0, GaugeFunction::power(2.0 / 3.0));
  Packing p = pack_disks(7);
  ConstructionLevel bad{7, p.R, 1.2, p.c, p.centers};
  EXPECT_THROW(tree.push_level(bad), DomainError);
  ConstructionLevel overlap{7, p.R, 0.4, p.c, p.centers};
  overlap.centers[1] = overlap.centers[0];
  EXPECT_THROW(tree.push_level(overlap), DomainError);
  ConstructionLevel ok{7, p.R, 0.4, p.c, p.centers};
  tree.push_level(ok);
  EXPECT_EQ(tree.depth(), 1u);
  EXPECT_THROW(tree.level(2), DomainError);
}
