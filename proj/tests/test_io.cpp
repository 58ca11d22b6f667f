#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "qcdist/errors.hpp"
#include "qcdist/io.hpp"

using namespace qcdist;
using io::Json;

TEST(Io, FormatNumber) {
  EXPECT_EQ(io::format_number(0.5), "0.5");
  EXPECT_EQ(io::format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(io::format_number(0.1)), 0.1);
  EXPECT_EQ(io::format_number(NAN), "nan");
}

TEST(Io, GaugeRoundTrip) {
  const GaugeFunction gs[] = {GaugeFunction::power(0.7), GaugeFunction(1.0, PowerLog{2.0}),
                              GaugeFunction(0.5, IteratedLog{1.5, 0.25}),
                              GaugeFunction(1.0, Tabulated{{{1e-4, 0.2}, {1e-2, 0.6}}})};
  for (const auto& g : gs) {
    const GaugeFunction back = io::gauge_from_json(io::to_json(g));
    EXPECT_EQ(io::to_json(back), io::to_json(g));
    for (double t : {1e-3, 0.05, 0.5}) EXPECT_EQ(back(t), g(t));
  }
}

TEST(Io, GaugeDefaultsAndErrors) {
  EXPECT_EQ(io::gauge_from_json(Json{{"family", "power_log"}, {"s", 1.0}}, 0.8).d(), 0.8);
  EXPECT_THROW(io::gauge_from_json(Json{{"family", "power_log"}, {"s", 1.0}}), ConfigError);
  EXPECT_THROW(io::gauge_from_json(Json{{"d", 1.0}, {"family", "power_log"}, {"sss", 1.0}}), ConfigError);
  EXPECT_THROW(io::gauge_from_json(Json{{"d", 1.0}, {"family", "constant_one"}, {"s", 1.0}}), ConfigError);
  EXPECT_THROW(io::gauge_from_json(Json{{"d", 3.0}, {"family", "constant_one"}}), ConfigError);
  EXPECT_THROW(io::gauge_from_json(Json{{"d", 1.0}, {"family", "bogus"}}), ConfigError);
}

TEST(Io, TreeRoundTrip) {
  const int ms[] = {7, 5, 4};
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms);
  const Json j = io::to_json(r.tree);
  const CantorTree back = io::tree_from_json(j);
  EXPECT_EQ(io::dump(io::to_json(back)), io::dump(j));
  ASSERT_EQ(back.depth(), 3u);
  for (std::size_t N = 1; N <= 3; ++N) {
    EXPECT_EQ(back.s(N), r.tree.s(N));
    EXPECT_EQ(back.t(N), r.tree.t(N));
  }
  Json bad = j;
  bad["extra"] = 1;
  EXPECT_THROW(io::tree_from_json(bad), ConfigError);
}

TEST(Io, ComposedMapRoundTrip) {
  const int ms[] = {4, 4};
  const BuildResult r = build(1.5, GaugeFunction::power(0.8), ms);
  const ComposedQCMap back = io::composed_map_from_json(io::to_json(r.map));
  ASSERT_EQ(back.layers().size(), r.map.layers().size());
  for (Complex z : {Complex(0.1, 0.2), Complex(-0.4, 0.3), Complex(0.55, -0.1)}) EXPECT_EQ(back(z), r.map(z));
}

TEST(Io, ReportsWriteNonFiniteAsNull) {
  DimensionReport rep;
  rep.fitted_dimension = NAN;
  const Json j = io::to_json(rep);
  EXPECT_TRUE(j["fitted_dimension"].is_null());
  EXPECT_EQ(io::dump(j).back(), '\n');
}

TEST(Io, CsvHasHeaderAndRows) {
  const int ms[] = {7, 7};
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms);
  const std::string csv = io::normalization_csv(normalization_report(r.tree));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.rfind("N,", 0), 0u);
}

TEST(Io, SvgHasOneCirclePerDiskPlusUnitCircle) {
  const std::vector<Disk> disks{{Complex(0.0, 0.0), 0.5}, {Complex(0.5, 0.5), 0.1}};
  const std::string svg = io::disks_svg(disks, "t");
  std::size_t n = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++n;
  EXPECT_EQ(n, 3u);
  EXPECT_NE(svg.find("viewBox=\"0 0 1000 1000\""), std::string::npos);
}
