#pragma once

// Serialization: JSON documents (sorted keys), CSV tables and SVG drawings.
// All numbers are written locale-independently; identical inputs give
// byte-identical output.

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "qcdist/cantor.hpp"
#include "qcdist/carleson.hpp"
#include "qcdist/dimension.hpp"
#include "qcdist/gauge.hpp"
#include "qcdist/qc_maps.hpp"

namespace qcdist::io {

using Json = nlohmann::json;

/// Shortest-round-trip free formatting: "%.17g" in the C locale.
std::string format_number(double x);

/// Throws ConfigError when `j` is not an object or has keys outside `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where);

// Gauge block: {"d", "family", "s", "family_d", "points"}; family is one of
// constant_one | power_log | iterated_log | tabulated.
Json to_json(const GaugeFunction& g);
/// `default_d` is used when the block has no "d".
GaugeFunction gauge_from_json(const Json& j, std::optional<double> default_d = std::nullopt);

// {"layers": [{"stretches": [{"center": [x, y], "r", "sigma", "K"}]}]}
Json to_json(const ComposedQCMap& map);
ComposedQCMap composed_map_from_json(const Json& j);

// {"K", "gauge", "normalization", "levels": [{"m", "R", "sigma", "c", "centers"}]}
Json to_json(const CantorTree& tree);
CantorTree tree_from_json(const Json& j);

Json to_json(const NormalizationReport& report);
Json to_json(const DimensionReport& report);
Json to_json(const ContentInequalityReport& report);
Json to_json(const BetaEstimate& estimate);
Json classification_json(const BoundaryDiskFamily& family, const IndexClassification& cls);

/// Pretty-printed with two-space indent and a trailing newline.
std::string dump(const Json& j);

// CSV tables with a header row and '\n' line ends.
std::string normalization_csv(const NormalizationReport& report);
std::string dimension_csv(const DimensionReport& report);
std::string content_inequality_csv(const ContentInequalityReport& report);
/// Columns r, p, integral, log_x, log_y, fit; the fitted beta and the
/// Pommerenke bound for `K` repeated on every row.
std::string means_csv(const BetaEstimate& estimate, double p, double K);

/// Circles drawn in a 1000x1000 viewBox whose inscribed circle is the closed unit disk.
std::string disks_svg(std::span<const Disk> disks, const std::string& title);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace qcdist::io
