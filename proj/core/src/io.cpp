#include "qcdist/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qcdist/errors.hpp"

namespace qcdist::io {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double number_at(const Json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(fmt::format("{}: missing \"{}\"", where, key));
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("{}: \"{}\" must be a number", where, key));
  return v.get<double>();
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from(const Json& j, const char* where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(fmt::format("{}: expected [x, y]", where));
  return {j[0].get<double>(), j[1].get<double>()};
}

// Non-finite values have no JSON literal; they are written as null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(fmt::format("{}: unknown key \"{}\"", where, key));
  }
}

// ---------------------------------------------------------------------------
// Gauge

Json to_json(const GaugeFunction& g) {
  Json j;
  j["d"] = g.d();
  std::visit(Overloaded{
                 [&](const ConstantOne&) { j["family"] = "constant_one"; },
                 [&](const PowerLog& f) {
                   j["family"] = "power_log";
                   j["s"] = f.s;
                 },
                 [&](const IteratedLog& f) {
                   j["family"] = "iterated_log";
                   j["family_d"] = f.d;
                   j["s"] = f.s;
                 },
                 [&](const Tabulated& f) {
                   j["family"] = "tabulated";
                   Json pts = Json::array();
                   for (const auto& [t, e] : f.points) pts.push_back(Json::array({t, e}));
                   j["points"] = std::move(pts);
                 },
             },
             g.family());
  return j;
}

GaugeFunction gauge_from_json(const Json& j, std::optional<double> default_d) {
  constexpr const char* where = "gauge";
  require_keys(j, {"d", "family", "s", "family_d", "points"}, where);
  double d = 0.0;
  if (j.contains("d")) {
    d = number_at(j, "d", where);
  } else if (default_d) {
    d = *default_d;
  } else {
    throw ConfigError("gauge: missing \"d\"");
  }
  const std::string family = j.contains("family") && j["family"].is_string()
                                 ? j["family"].get<std::string>()
                                 : std::string("constant_one");
  if (j.contains("family") && !j["family"].is_string())
    throw ConfigError("gauge: \"family\" must be a string");

  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (j.contains(k))
        throw ConfigError(fmt::format("gauge: \"{}\" does not apply to family {}", k, family));
  };

  try {
    if (family == "constant_one") {
      forbid({"s", "family_d", "points"});
      return GaugeFunction(d, ConstantOne{});
    }
    if (family == "power_log") {
      forbid({"family_d", "points"});
      return GaugeFunction(d, PowerLog{number_at(j, "s", where)});
    }
    if (family == "iterated_log") {
      forbid({"points"});
      return GaugeFunction(d, IteratedLog{number_at(j, "family_d", where), number_at(j, "s", where)});
    }
    if (family == "tabulated") {
      forbid({"s", "family_d"});
      if (!j.contains("points") || !j["points"].is_array())
        throw ConfigError("gauge: tabulated family needs \"points\": [[t, eps], ...]");
      Tabulated tab;
      for (const auto& p : j["points"]) {
        const Complex z = complex_from(p, "gauge.points");
        tab.points.emplace_back(z.real(), z.imag());
      }
      return GaugeFunction(d, std::move(tab));
    }
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("gauge: {}", e.what()));
  }
  throw ConfigError(fmt::format("gauge: unknown family \"{}\"", family));
}

// ---------------------------------------------------------------------------
// Maps

Json to_json(const ComposedQCMap& map) {
  Json layers = Json::array();
  for (const auto& layer : map.layers()) {
    Json stretches = Json::array();
    for (const auto& s : layer.stretches())
      stretches.push_back({{"center", complex_json(s.center())}, {"r", s.r()}, {"sigma", s.sigma()}, {"K", s.K()}});
    layers.push_back({{"stretches", std::move(stretches)}});
  }
  return {{"layers", std::move(layers)}};
}

ComposedQCMap composed_map_from_json(const Json& j) {
  require_keys(j, {"layers"}, "map");
  if (!j.contains("layers") || !j["layers"].is_array()) throw ConfigError("map: \"layers\" must be an array");
  ComposedQCMap map;
  try {
    for (const auto& layer : j["layers"]) {
      require_keys(layer, {"stretches"}, "map.layers[]");
      if (!layer.contains("stretches") || !layer["stretches"].is_array())
        throw ConfigError("map.layers[]: \"stretches\" must be an array");
      std::vector<RadialStretch> stretches;
      for (const auto& s : layer["stretches"]) {
        constexpr const char* where = "map.layers[].stretches[]";
        require_keys(s, {"center", "r", "sigma", "K"}, where);
        if (!s.contains("center")) throw ConfigError("map: stretch without \"center\"");
        stretches.emplace_back(complex_from(s["center"], where), number_at(s, "r", where),
                               number_at(s, "sigma", where), number_at(s, "K", where));
      }
      map.push_back(MultiStretch(std::move(stretches)));
    }
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("map: {}", e.what()));
  }
  return map;
}

// ---------------------------------------------------------------------------
// Tree

Json to_json(const CantorTree& tree) {
  Json levels = Json::array();
  for (const auto& lv : tree.levels()) {
    Json centers = Json::array();
    for (const auto& z : lv.centers) centers.push_back(complex_json(z));
    levels.push_back({{"m", lv.m}, {"R", lv.R}, {"sigma", lv.sigma}, {"c", lv.c}, {"centers", std::move(centers)}});
  }
  return {{"K", tree.K()},
          {"gauge", to_json(tree.gauge())},
          {"normalization", to_string(tree.normalization())},
          {"levels", std::move(levels)}};
}

CantorTree tree_from_json(const Json& j) {
  constexpr const char* where = "tree";
  require_keys(j, {"K", "gauge", "normalization", "levels"}, where);
  const double K = number_at(j, "K", where);
  if (!j.contains("gauge")) throw ConfigError("tree: missing \"gauge\"");
  Normalization mode = Normalization::source;
  if (j.contains("normalization")) {
    const Json& n = j["normalization"];
    if (n == "source")
      mode = Normalization::source;
    else if (n == "image")
      mode = Normalization::image;
    else
      throw ConfigError("tree: \"normalization\" must be \"source\" or \"image\"");
  }
  if (!j.contains("levels") || !j["levels"].is_array()) throw ConfigError("tree: \"levels\" must be an array");
  try {
    CantorTree tree(K, gauge_from_json(j["gauge"]), mode);
    for (const auto& lj : j["levels"]) {
      constexpr const char* lw = "tree.levels[]";
      require_keys(lj, {"m", "R", "sigma", "c", "centers"}, lw);
      ConstructionLevel lv;
      if (!lj.contains("m") || !lj["m"].is_number_integer()) throw ConfigError("tree.levels[]: \"m\" must be an integer");
      lv.m = lj["m"].get<int>();
      lv.R = number_at(lj, "R", lw);
      lv.sigma = number_at(lj, "sigma", lw);
      lv.c = number_at(lj, "c", lw);
      if (!lj.contains("centers") || !lj["centers"].is_array())
        throw ConfigError("tree.levels[]: \"centers\" must be an array");
      for (const auto& z : lj["centers"]) lv.centers.push_back(complex_from(z, lw));
      tree.push_level(std::move(lv));
    }
    return tree;
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("tree: {}", e.what()));
  }
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const NormalizationReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"N", r.N},
                    {"m", r.m},
                    {"R", num(r.R)},
                    {"sigma", num(r.sigma)},
                    {"c", num(r.c)},
                    {"s", num(r.s)},
                    {"t", num(r.t)},
                    {"residual_equation", num(r.residual_equation)},
                    {"residual_source", num(r.residual_source)},
                    {"residual_image", num(r.residual_image)},
                    {"eps_prime", num(r.eps_prime)},
                    {"shrink_bound", num(r.shrink_bound)},
                    {"shrink_bound_holds", r.shrink_bound_holds}});
  return {{"rows", std::move(rows)},
          {"max_abs_residual_equation", num(report.max_abs_residual_equation)},
          {"max_abs_residual_source", num(report.max_abs_residual_source)},
          {"max_abs_residual_image", num(report.max_abs_residual_image)}};
}

Json to_json(const DimensionReport& report) {
  Json scales = Json::array();
  for (const auto& s : report.scales)
    scales.push_back({{"scale", num(s.scale)},
                      {"value", num(s.value)},
                      {"log_x", num(s.log_x)},
                      {"log_y", num(s.log_y)},
                      {"fit", num(s.fit)}});
  Json anchors = Json::array();
  for (double a : report.anchor_dimensions) anchors.push_back(num(a));
  return {{"method", to_string(report.method)},
          {"scales", std::move(scales)},
          {"fitted_dimension", num(report.fitted_dimension)},
          {"slope", num(report.slope)},
          {"intercept", num(report.intercept)},
          {"fit_residual", num(report.fit_residual)},
          {"anchor_dimensions", std::move(anchors)},
          {"anchor_spread", num(report.anchor_spread)},
          {"exponent", num(report.exponent)},
          {"decay_exponent", num(report.decay_exponent)}};
}

Json to_json(const ContentInequalityReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back(
        {{"N", r.N}, {"image_sum", num(r.image_sum)}, {"source_sum", num(r.source_sum)}, {"ratio", num(r.ratio)}});
  return {{"rows", std::move(rows)},
          {"max_ratio", num(report.max_ratio)},
          {"min_ratio", num(report.min_ratio)},
          {"variation", num(report.variation)},
          {"growth_exponent", num(report.growth_exponent)},
          {"growth_per_level", num(report.growth_per_level)}};
}

Json to_json(const BetaEstimate& estimate) {
  Json radii = Json::array(), integrals = Json::array();
  for (double r : estimate.radii) radii.push_back(num(r));
  for (double v : estimate.integrals) integrals.push_back(num(v));
  return {{"beta", num(estimate.beta)},
          {"intercept", num(estimate.intercept)},
          {"fit_residual", num(estimate.fit_residual)},
          {"low_confidence", estimate.low_confidence},
          {"radii", std::move(radii)},
          {"integrals", std::move(integrals)}};
}

Json classification_json(const BoundaryDiskFamily& family, const IndexClassification& cls) {
  std::vector<char> good(family.size(), 0), borderline(family.size(), 0);
  for (auto i : cls.good) good[i] = 1;
  for (auto i : cls.borderline) borderline[i] = 1;
  Json rows = Json::array();
  for (std::size_t i = 0; i < family.size(); ++i)
    rows.push_back({{"index", i},
                    {"z", complex_json(family.point(i))},
                    {"derivative_modulus", num(cls.derivative_modulus[i])},
                    {"threshold", num(cls.threshold[i])},
                    {"good", good[i] != 0},
                    {"borderline", borderline[i] != 0}});
  return {{"indices", std::move(rows)},
          {"good_count", cls.good.size()},
          {"bad_count", cls.bad.size()},
          {"borderline_count", cls.borderline.size()}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

std::string normalization_csv(const NormalizationReport& report) {
  std::string out = csv_row({"N", "m", "R", "sigma", "c", "s", "t", "residual_equation", "residual_source",
                             "residual_image", "eps_prime", "shrink_bound", "shrink_bound_holds"});
  for (const auto& r : report.rows)
    out += csv_row({std::to_string(r.N), std::to_string(r.m), format_number(r.R), format_number(r.sigma),
                    format_number(r.c), format_number(r.s), format_number(r.t), format_number(r.residual_equation),
                    format_number(r.residual_source), format_number(r.residual_image), format_number(r.eps_prime),
                    format_number(r.shrink_bound), r.shrink_bound_holds ? "1" : "0"});
  return out;
}

std::string dimension_csv(const DimensionReport& report) {
  std::string out = csv_row({"method", "scale", "value", "log_x", "log_y", "fit"});
  for (const auto& s : report.scales)
    out += csv_row({to_string(report.method), format_number(s.scale), format_number(s.value),
                    format_number(s.log_x), format_number(s.log_y), format_number(s.fit)});
  return out;
}

std::string content_inequality_csv(const ContentInequalityReport& report) {
  std::string out = csv_row({"N", "image_sum", "source_sum", "ratio"});
  for (const auto& r : report.rows)
    out += csv_row({std::to_string(r.N), format_number(r.image_sum), format_number(r.source_sum),
                    format_number(r.ratio)});
  return out;
}

std::string means_csv(const BetaEstimate& estimate, double p, double K) {
  const double bound = pommerenke_bound(K, p);
  std::string out = csv_row({"r", "p", "integral", "log_x", "log_y", "fit", "beta", "pommerenke_bound"});
  for (std::size_t i = 0; i < estimate.radii.size(); ++i) {
    const double x = -std::log(1.0 - estimate.radii[i]);
    out += csv_row({format_number(estimate.radii[i]), format_number(p), format_number(estimate.integrals[i]),
                    format_number(x), format_number(std::log(estimate.integrals[i])),
                    format_number(estimate.intercept + estimate.beta * x), format_number(estimate.beta),
                    format_number(bound)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG

std::string disks_svg(std::span<const Disk> disks, const std::string& title) {
  // Unit disk -> circle of radius 500 centred at (500, 500); y axis flipped.
  auto coord = [](double v) { return fmt::format("{:.6f}", v); };
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
  std::string escaped;
  for (char ch : title) {
    switch (ch) {
      case '<': escaped += "&lt;"; break;
      case '>': escaped += "&gt;"; break;
      case '&': escaped += "&amp;"; break;
      default: escaped += ch;
    }
  }
  out += fmt::format("<title>{}</title>\n", escaped);
  out += "<circle cx=\"500\" cy=\"500\" r=\"500\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
  out += "<g fill=\"#1f4e79\" fill-opacity=\"0.6\" stroke=\"none\">\n";
  for (const auto& d : disks)
    out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", coord(500.0 + 500.0 * d.center.real()),
                       coord(500.0 - 500.0 * d.center.imag()), coord(500.0 * d.radius));
  out += "</g>\n</svg>\n";
  return out;
}

// ---------------------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open {} for writing", path.string()));
  f << content;
  if (!f) throw Error(fmt::format("failed writing {}", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace qcdist::io
