#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <qcdist/cantor.hpp>
#include <qcdist/carleson.hpp>
#include <qcdist/io.hpp>

namespace qcdist::cli {

enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kPrecision = 4,
};

struct AnalysisConfig {
  int j_min = 1;
  /// Finest box-counting scale; by default just above the smallest drawn disk.
  std::optional<int> j_max;
  int shifted_anchors = 4;
  /// Exponent for the source-side covering-sum fit; defaults to the gauge exponent.
  std::optional<double> content_exponent;
  /// Box counting uses at most this many disks (the deepest level below it).
  std::size_t max_box_disks = 2'000'000;
};

struct MeansConfig {
  AnalyticTestMap map;
  double p = 1.0;
  int j_min = 6;
  int j_max = 16;
  double K = 2.0;
  struct Classification {
    int k = 8;
    double alpha = 0.5;
    double delta = 0.75;
  };
  std::optional<Classification> classification;
};

/// Everything a command needs, validated before any computation starts.
struct RunConfig {
  double K = 2.0;
  std::optional<GaugeFunction> gauge;
  std::vector<int> levels;
  BuildOptions build;
  /// Existing tree artifact for analyze; replaces the construction block.
  std::optional<std::filesystem::path> tree_path;
  std::optional<CantorTree> tree;

  AnalysisConfig analysis;
  std::optional<MeansConfig> means;

  std::filesystem::path out = "qcdist-out";
  std::uint64_t seed = 0;
  int verbosity = 0;
};

/// Command-line values that override the config file.
struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<int> levels;
  std::optional<double> K;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
};

/// Parses and validates a config document (ConfigError on any problem).
RunConfig parse_config(const io::Json& doc, const Overrides& overrides);

/// Catalog map from its name and parameters, e.g. ("power", {"b": 2}).
AnalyticTestMap map_from_json(const io::Json& j);

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcdist::cli
