#include <cmath>
#include <limits>

#include <fmt/format.h>

#include <qcdist/errors.hpp>

#include "cli.hpp"

namespace qcdist::cli {

namespace {

using io::Json;

double number(const Json& j, const char* key, const char* where) {
  const Json& v = j.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>()))
    throw ConfigError(fmt::format("{}: \"{}\" must be a finite number", where, key));
  return v.get<double>();
}

long long integer(const Json& j, const char* key, const char* where) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(fmt::format("{}: \"{}\" must be an integer", where, key));
  return v.get<long long>();
}

bool boolean(const Json& j, const char* key, const char* where) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(fmt::format("{}: \"{}\" must be true or false", where, key));
  return v.get<bool>();
}

int disk_count(long long m, const char* where) {
  if (m < kMinPackingCount || m > 100'000'000)
    throw ConfigError(fmt::format("{}: m must lie in [{}, 1e8]", where, kMinPackingCount));
  return static_cast<int>(m);
}

void parse_analysis(const Json& j, AnalysisConfig& a) {
  constexpr const char* where = "analysis";
  io::require_keys(j, {"j_min", "j_max", "shifted_anchors", "content_exponent", "max_box_disks"}, where);
  if (j.contains("j_min")) a.j_min = static_cast<int>(integer(j, "j_min", where));
  if (j.contains("j_max")) a.j_max = static_cast<int>(integer(j, "j_max", where));
  if (j.contains("shifted_anchors")) a.shifted_anchors = static_cast<int>(integer(j, "shifted_anchors", where));
  if (j.contains("content_exponent")) a.content_exponent = number(j, "content_exponent", where);
  if (j.contains("max_box_disks")) {
    const long long n = integer(j, "max_box_disks", where);
    if (n < 1) throw ConfigError("analysis: max_box_disks must be positive");
    a.max_box_disks = static_cast<std::size_t>(n);
  }
  if (a.j_min < -4 || a.j_min > 40) throw ConfigError("analysis: j_min must lie in [-4, 40]");
  if (a.j_max && (*a.j_max > 40 || *a.j_max - a.j_min + 1 < 4))
    throw ConfigError("analysis: need j_max <= 40 and at least 4 scales");
  if (a.shifted_anchors < 0 || a.shifted_anchors > 64)
    throw ConfigError("analysis: shifted_anchors must lie in [0, 64]");
  if (a.content_exponent && !(*a.content_exponent >= 0.0 && *a.content_exponent <= 2.0))
    throw ConfigError("analysis: content_exponent must lie in [0, 2]");
}

MeansConfig parse_means(const Json& j) {
  constexpr const char* where = "means";
  io::require_keys(j, {"map", "p", "j_min", "j_max", "K", "classification"}, where);
  MeansConfig m;
  if (!j.contains("map")) throw ConfigError("means: missing \"map\"");
  m.map = map_from_json(j["map"]);
  if (j.contains("p")) m.p = number(j, "p", where);
  if (j.contains("j_min")) m.j_min = static_cast<int>(integer(j, "j_min", where));
  if (j.contains("j_max")) m.j_max = static_cast<int>(integer(j, "j_max", where));
  if (j.contains("K")) m.K = number(j, "K", where);
  if (m.j_min < 1 || m.j_max > 24 || m.j_max - m.j_min + 1 < 5)
    throw ConfigError("means: need 1 <= j_min, j_max <= 24 and at least 5 radii");
  if (!(m.K >= 1.0)) throw ConfigError("means: K must be >= 1");
  if (j.contains("classification")) {
    const Json& c = j["classification"];
    constexpr const char* cw = "means.classification";
    io::require_keys(c, {"k", "alpha", "delta"}, cw);
    MeansConfig::Classification cl;
    if (c.contains("k")) cl.k = static_cast<int>(integer(c, "k", cw));
    if (c.contains("alpha")) cl.alpha = number(c, "alpha", cw);
    if (c.contains("delta")) cl.delta = number(c, "delta", cw);
    if (cl.k < 1 || cl.k > 20) throw ConfigError("means.classification: k must lie in [1, 20]");
    if (!(0.0 < cl.alpha && cl.alpha < cl.delta && cl.delta < 1.0))
      throw ConfigError("means.classification: need 0 < alpha < delta < 1");
    m.classification = cl;
  }
  return m;
}

}  // namespace

AnalyticTestMap map_from_json(const Json& j) {
  constexpr const char* where = "map";
  Json desc = j.is_string() ? Json{{"name", j}} : j;
  io::require_keys(desc, {"name", "b", "a", "coefficients"}, where);
  if (!desc.contains("name") || !desc["name"].is_string()) throw ConfigError("map: missing \"name\"");
  const std::string name = desc["name"].get<std::string>();
  auto forbid_all_but = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : desc.items()) {
      if (key == "name") continue;
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw ConfigError(fmt::format("map: \"{}\" does not apply to {}", key, name));
    }
  };
  try {
    if (name == "identity") {
      forbid_all_but({});
      return AnalyticTestMap(maps::Identity{});
    }
    if (name == "power") {
      forbid_all_but({"b"});
      return AnalyticTestMap(maps::HalfPlanePower{desc.contains("b") ? number(desc, "b", where) : 1.0});
    }
    if (name == "koebe") {
      forbid_all_but({});
      return AnalyticTestMap(maps::Koebe{});
    }
    if (name == "mobius") {
      forbid_all_but({"a"});
      Complex a{0.0, 0.0};
      if (desc.contains("a")) {
        const Json& v = desc["a"];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
          throw ConfigError("map: \"a\" must be [x, y]");
        a = {v[0].get<double>(), v[1].get<double>()};
      }
      return AnalyticTestMap(maps::Mobius{a});
    }
    if (name == "polynomial") {
      forbid_all_but({"coefficients"});
      maps::Polynomial poly;
      if (!desc.contains("coefficients") || !desc["coefficients"].is_array())
        throw ConfigError("map: polynomial needs \"coefficients\": [[re, im], ...]");
      for (const auto& c : desc["coefficients"]) {
        if (c.is_number()) {
          poly.coefficients.emplace_back(c.get<double>(), 0.0);
        } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
          poly.coefficients.emplace_back(c[0].get<double>(), c[1].get<double>());
        } else {
          throw ConfigError("map: polynomial coefficients must be numbers or [re, im]");
        }
      }
      return AnalyticTestMap(std::move(poly));
    }
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("map: {}", e.what()));
  }
  throw ConfigError(fmt::format("map: unknown map \"{}\" (identity, power, koebe, mobius, polynomial)", name));
}

RunConfig parse_config(const Json& doc, const Overrides& ov) {
  constexpr const char* where = "config";
  io::require_keys(doc,
                   {"K", "gauge", "levels", "auto_levels", "m_growth", "target_small", "grow_m",
                    "enforce_shrink_rule", "node_cap", "normalization", "tree", "analysis", "means",
                    "output_dir", "seed", "verbosity"},
                   where);
  RunConfig cfg;

  if (doc.contains("K")) cfg.K = number(doc, "K", where);
  if (ov.K) cfg.K = *ov.K;
  if (!(cfg.K >= 1.0 && std::isfinite(cfg.K))) throw ConfigError("config: K must be a finite number >= 1");

  if (doc.contains("normalization")) {
    const Json& n = doc["normalization"];
    if (n == "source")
      cfg.build.normalization = Normalization::source;
    else if (n == "image")
      cfg.build.normalization = Normalization::image;
    else
      throw ConfigError("config: \"normalization\" must be \"source\" or \"image\"");
  }

  // The default exponent is the critical one, 2/(K+1), or 1 for the image normalisation.
  const double default_d = cfg.build.normalization == Normalization::image ? 1.0 : 2.0 / (cfg.K + 1.0);
  cfg.gauge = doc.contains("gauge") ? io::gauge_from_json(doc["gauge"], default_d) : GaugeFunction::power(default_d);
  if (cfg.build.normalization == Normalization::image && cfg.gauge->d() != 1.0)
    throw ConfigError("config: the image normalisation needs a gauge with d = 1");

  if (doc.contains("levels") && (doc.contains("auto_levels") || doc.contains("m_growth")))
    throw ConfigError("config: give either \"levels\" or \"auto_levels\" with \"m_growth\", not both");
  if (doc.contains("levels")) {
    if (!doc["levels"].is_array()) throw ConfigError("config: \"levels\" must be an array");
    for (const auto& lv : doc["levels"]) {
      io::require_keys(lv, {"m"}, "config.levels[]");
      if (!lv.contains("m")) throw ConfigError("config.levels[]: missing \"m\"");
      cfg.levels.push_back(disk_count(integer(lv, "m", "config.levels[]"), "config.levels[]"));
    }
    if (ov.levels) {
      if (*ov.levels < 1) throw ConfigError("--levels must be positive");
      if (cfg.levels.empty()) throw ConfigError("--levels cannot extend an empty level list");
      cfg.levels.resize(static_cast<std::size_t>(*ov.levels), cfg.levels.back());
    }
  } else {
    long long n = 4;
    double initial = 7.0, factor = 1.0;
    if (doc.contains("auto_levels")) n = integer(doc, "auto_levels", where);
    if (ov.levels) n = *ov.levels;
    if (doc.contains("m_growth")) {
      const Json& g = doc["m_growth"];
      io::require_keys(g, {"initial", "factor"}, "config.m_growth");
      if (g.contains("initial")) initial = static_cast<double>(integer(g, "initial", "config.m_growth"));
      if (g.contains("factor")) factor = number(g, "factor", "config.m_growth");
      if (!(factor >= 1.0)) throw ConfigError("config.m_growth: factor must be >= 1");
    }
    if (n < 0 || n > 64) throw ConfigError("config: auto_levels must lie in [0, 64]");
    for (long long N = 0; N < n; ++N) {
      const double m = std::ceil(initial * std::pow(factor, static_cast<double>(N)) - 1e-9);
      if (!(m <= 1e8)) throw ConfigError("config.m_growth: disk counts exceed 1e8");
      cfg.levels.push_back(disk_count(static_cast<long long>(m), "config.m_growth"));
    }
  }

  if (doc.contains("target_small")) {
    cfg.build.target_small = number(doc, "target_small", where);
    if (!(cfg.build.target_small > 0.0 && cfg.build.target_small <= 1.0))
      throw ConfigError("config: target_small must lie in (0, 1]");
  }
  if (doc.contains("grow_m")) cfg.build.grow_m = boolean(doc, "grow_m", where);
  if (doc.contains("enforce_shrink_rule")) cfg.build.enforce_shrink_rule = boolean(doc, "enforce_shrink_rule", where);
  if (doc.contains("node_cap")) {
    const long long cap = integer(doc, "node_cap", where);
    if (cap < 1) throw ConfigError("config: node_cap must be positive");
    cfg.build.node_cap = static_cast<std::size_t>(cap);
  }

  if (doc.contains("tree")) {
    if (!doc["tree"].is_string()) throw ConfigError("config: \"tree\" must be a path");
    cfg.tree_path = doc["tree"].get<std::string>();
    Json tree_doc;
    try {
      tree_doc = Json::parse(io::read_text(*cfg.tree_path));
    } catch (const Json::parse_error& e) {
      throw ConfigError(fmt::format("tree artifact {}: {}", cfg.tree_path->string(), e.what()));
    }
    cfg.tree = io::tree_from_json(tree_doc);
  }

  if (doc.contains("analysis")) parse_analysis(doc["analysis"], cfg.analysis);
  if (doc.contains("means")) cfg.means = parse_means(doc["means"]);

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("config: \"output_dir\" must be a string");
    cfg.out = doc["output_dir"].get<std::string>();
  }
  if (ov.out) cfg.out = *ov.out;
  if (doc.contains("seed")) {
    const Json& s = doc["seed"];
    if (!s.is_number_unsigned()) throw ConfigError("config: \"seed\" must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (ov.seed) cfg.seed = *ov.seed;
  if (doc.contains("verbosity")) cfg.verbosity = static_cast<int>(integer(doc, "verbosity", where));
  cfg.verbosity = std::max(cfg.verbosity, ov.verbosity);
  return cfg;
}

}  // namespace qcdist::cli
