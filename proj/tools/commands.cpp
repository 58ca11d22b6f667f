#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <qcdist/dimension.hpp>
#include <qcdist/errors.hpp>

#include "cli.hpp"

namespace qcdist::cli {

namespace {

using io::Json;
namespace fs = std::filesystem;

constexpr std::size_t kMaxSerializedStretches = 100'000;
constexpr double kMaxDrawnDisks = 20'000;
constexpr std::size_t kBoundarySampleDisks = 4096;

// Files are collected in memory and written only once every computation has succeeded.
class Artifacts {
 public:
  explicit Artifacts(std::set<std::string> formats) : formats_(std::move(formats)) {}

  void add(const std::string& name, std::string content) {
    const std::string ext = fs::path(name).extension().string().substr(1);
    if (formats_.empty() || formats_.count(ext)) files_[name] = std::move(content);
  }
  std::size_t size() const { return files_.size(); }
  void write(const fs::path& dir) const {
    for (const auto& [name, content] : files_) io::write_text(dir / name, content);
  }

 private:
  std::set<std::string> formats_;
  std::map<std::string, std::string> files_;
};

struct Logger {
  std::ostream& err;
  int verbosity = 0;
  template <class... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) const {
    if (verbosity > 0) err << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
};

// Level drawn in the SVGs: the deepest materialised level with a drawable number of disks.
std::size_t drawable_level(const CantorTree& tree, std::size_t materialized) {
  std::size_t N = 0;
  while (N < materialized && tree.count(N + 1) <= kMaxDrawnDisks) ++N;
  return N;
}

BuildResult run_construction(const RunConfig& cfg, Artifacts& files, Json& summary, const Logger& log) {
  log.info("building {} levels at K = {}", cfg.levels.size(), cfg.K);
  BuildResult r = build(cfg.K, *cfg.gauge, cfg.levels, cfg.build);
  const NormalizationReport report = normalization_report(r.tree);
  log.info("max |residual| {}", io::format_number(report.max_abs_residual_equation));

  files.add("levels.csv", io::normalization_csv(report));
  files.add("normalization.json", io::dump(io::to_json(report)));
  files.add("tree.json", io::dump(io::to_json(r.tree)));

  Json notices = Json::array();
  if (r.truncated) notices.push_back(r.notice);
  std::size_t stretches = 0;
  for (const auto& layer : r.map.layers()) stretches += layer.size();
  if (stretches <= kMaxSerializedStretches) {
    files.add("map.json", io::dump(io::to_json(r.map)));
  } else {
    notices.push_back(fmt::format("map.json omitted: {} stretches exceed {}", stretches, kMaxSerializedStretches));
  }

  const std::size_t drawn = drawable_level(r.tree, r.materialized_depth);
  if (drawn > 0) {
    files.add("source.svg", io::disks_svg(r.tree.source_disks(drawn), fmt::format("source disks, level {}", drawn)));
    files.add("image.svg", io::disks_svg(r.tree.image_disks(drawn), fmt::format("image disks, level {}", drawn)));
  } else {
    notices.push_back("no level is small enough to draw");
  }

  std::vector<int> ms;
  for (const auto& lv : r.tree.levels()) ms.push_back(lv.m);
  summary["construct"] = {{"K", cfg.K},
                          {"depth", r.tree.depth()},
                          {"materialized_depth", r.materialized_depth},
                          {"drawn_level", drawn},
                          {"m", ms},
                          {"max_abs_residual", report.max_abs_residual_equation},
                          {"notices", std::move(notices)}};
  return r;
}

struct AnalysisResult {
  std::optional<DimensionReport> box_source;
  std::optional<DimensionReport> image_fit;
  std::optional<ContentInequalityReport> inequality;
  double image_slack = 0.0;
  bool critical = false;
};

bool is_critical(const CantorTree& tree) {
  return tree.gauge().is_pure_power() && std::abs(tree.gauge().d() - 2.0 / (tree.K() + 1.0)) <= 1e-12;
}

AnalysisResult run_analysis(const RunConfig& cfg, const CantorTree& tree, Artifacts& files, Json& summary,
                            const Logger& log) {
  if (tree.depth() == 0) throw ConfigError("analyze: the tree has no levels");
  AnalysisResult res;
  Json s;
  Json notes = Json::array();

  // Box counting on the deepest source level that fits the caps.
  std::size_t D = std::min(tree.depth(), tree.materializable_depth(cfg.build.node_cap));
  while (D > 0 && tree.count(D) > static_cast<double>(cfg.analysis.max_box_disks)) --D;
  if (D > 0) {
    BoxCountingOptions opts;
    opts.j_min = cfg.analysis.j_min;
    opts.j_max = cfg.analysis.j_max.value_or(
        std::min(24, static_cast<int>(std::floor(std::log2(1.0 / (2.0 * tree.s(D)))))));
    opts.shifted_anchors = cfg.analysis.shifted_anchors;
    opts.seed = cfg.seed;
    if (opts.j_max - opts.j_min + 1 >= 4) {
      log.info("box counting {} source disks at level {}", tree.count(D), D);
      res.box_source = box_dimension(tree.source_disks(D), opts);
      files.add("dimension_source_box.csv", io::dimension_csv(*res.box_source));
      files.add("dimension_source_box.json", io::dump(io::to_json(*res.box_source)));
      s["source_box_dimension"] = res.box_source->fitted_dimension;
      s["source_box_level"] = D;
    } else {
      notes.push_back("box counting skipped: fewer than 4 dyadic scales above the disk size");
    }
  } else {
    notes.push_back("box counting skipped: no level within the disk caps");
  }

  if (tree.depth() >= 4) {
    const double t_src = cfg.analysis.content_exponent.value_or(tree.gauge().d());
    const DimensionReport src = content_sum_fit(tree, Side::source, t_src);
    files.add("dimension_source_sums.csv", io::dimension_csv(src));
    files.add("dimension_source_sums.json", io::dump(io::to_json(src)));
    s["source_sum_dimension"] = src.fitted_dimension;
    res.image_fit = content_sum_fit(tree, Side::image, 1.0);
    files.add("dimension_image_sums.csv", io::dimension_csv(*res.image_fit));
    files.add("dimension_image_sums.json", io::dump(io::to_json(*res.image_fit)));
    s["image_sum_dimension"] = res.image_fit->fitted_dimension;
  } else {
    notes.push_back("covering-sum fits skipped: they need at least 4 levels");
  }

  s["source_similarity_dimension"] = similarity_dimension(tree, Side::source).fitted_dimension;
  s["image_similarity_dimension"] = similarity_dimension(tree, Side::image).fitted_dimension;
  res.image_slack = image_dimension_slack(tree);
  s["image_dimension_slack"] = res.image_slack;
  s["predicted_image_dimension"] = distortion(tree.gauge().d(), tree.K());

  res.critical = is_critical(tree);
  if (res.critical) {
    res.inequality = verify_content_inequality(tree);
    files.add("content_inequality.csv", io::content_inequality_csv(*res.inequality));
    files.add("content_inequality.json", io::dump(io::to_json(*res.inequality)));
    s["content_ratio_variation"] = res.inequality->variation;
    s["content_growth_exponent"] = res.inequality->growth_exponent;
  } else {
    notes.push_back("content inequality skipped: gauge is not t^{2/(K+1)}");
  }
  s["notes"] = std::move(notes);
  summary["analyze"] = std::move(s);
  return res;
}

// Largest distance from phi_D(source boundary point) to the matching image circle.
double boundary_error(const BuildResult& r) {
  const std::size_t D = r.materialized_depth;
  const auto src = r.tree.source_disks(D);
  const auto img = r.tree.image_disks(D);
  const std::size_t stride = std::max<std::size_t>(1, src.size() / kBoundarySampleDisks);
  double worst = 0.0;
  for (std::size_t i = 0; i < src.size(); i += stride) {
    for (int a = 0; a < 4; ++a) {
      const Complex z = src[i].center + std::polar(src[i].radius, 0.3 + 1.5707963267948966 * a);
      worst = std::max(worst, std::abs(std::abs(r.map(z) - img[i].center) - img[i].radius));
    }
  }
  return worst;
}

struct Check {
  std::string name;
  bool passed;
  double value;
  double tolerance;
};

void print_formulas(const CLI::App& sub, double K, double t, double t_prime, double dim_A, double q,
                    double beta, double p, std::ostream& out) {
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  auto line = [&](const std::string& label, double v) { out << label << " = " << io::format_number(v) << '\n'; };
  try {
    bool any = false;
    if (given("--K") && given("--t")) {
      line(fmt::format("distortion(t={}, K={})", io::format_number(t), io::format_number(K)), distortion(t, K));
      any = true;
    }
    if (given("--K") && given("--t-prime")) {
      line(fmt::format("distortion_inverse(t'={}, K={})", io::format_number(t_prime), io::format_number(K)),
           distortion_inverse(t_prime, K));
      any = true;
    }
    if (given("--dim-A") || given("--q") || given("--beta")) {
      if (!(given("--dim-A") && given("--q") && given("--beta")))
        throw ConfigError("makarov_bound needs --dim-A, --q and --beta");
      line("makarov_bound", makarov_bound(dim_A, q, beta));
      any = true;
    }
    if (given("--K") && given("--p")) {
      line("pommerenke_bound", pommerenke_bound(K, p));
      line("brennan_reference", brennan_reference(K, p));
      any = true;
    }
    if (given("--K")) {
      const QuasicircleBounds qb = quasicircle_bounds(K);
      line("quasicircle_upper_37", qb.becker_pommerenke);
      line("quasicircle_upper_1", qb.smirnov);
      line("quasicircle_lower_reference", qb.lower_reference);
      any = true;
    }
    if (!any) throw ConfigError("formulas: nothing to evaluate; pass --K and/or --t, --t-prime, --dim-A, --q, --beta, --p");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasiconformal distortion of Hausdorff contents: construction and checks", "qcdist"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path, out_dir;
  int levels = 0;
  double K = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> formats;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--levels", levels, "Number of construction levels")->check(CLI::Range(1, 64));
    sub->add_option("--K", K, "Distortion constant K >= 1");
    sub->add_option("--seed", seed, "Seed for shifted box-counting grids");
    sub->add_option("--format", formats, "Restrict outputs to csv, json and/or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_flag("-v,--verbose", ov.verbosity, "Progress messages on stderr");
  };

  CLI::App* construct = app.add_subcommand("construct", "Build the set, its image and the composed map");
  CLI::App* analyze = app.add_subcommand("analyze", "Dimension estimates and content ratios of a tree");
  CLI::App* means = app.add_subcommand("means", "Integral means of a catalog map and the fitted beta");
  CLI::App* formulas = app.add_subcommand("formulas", "Evaluate the distortion and bound formulas");
  CLI::App* verify = app.add_subcommand("verify", "construct + analyze + consistency checks");
  for (auto* sub : {construct, analyze, means, verify}) common(sub);

  std::string map_name;
  double b = 1.0, p = 1.0;
  int j_min = 6, j_max = 16;
  means->add_option("--map", map_name, "identity | power | koebe | mobius | polynomial");
  means->add_option("--b", b, "Exponent of the power map f'(z) = (1-z)^{-b}");
  means->add_option("--p", p, "Integral means exponent");
  means->add_option("--j-min", j_min, "Smallest j in r = 1 - 2^{-j}");
  means->add_option("--j-max", j_max, "Largest j in r = 1 - 2^{-j}");

  double f_t = 0.0, f_tp = 0.0, f_dim = 0.0, f_q = 0.0, f_beta = 0.0, f_p = 0.0, f_K = 1.0;
  formulas->add_option("--K", f_K, "Distortion constant K >= 1");
  formulas->add_option("--t", f_t, "Source dimension");
  formulas->add_option("--t-prime", f_tp, "Image dimension");
  formulas->add_option("--dim-A", f_dim, "Dimension of the boundary set");
  formulas->add_option("--q", f_q, "Exponent q > 0");
  formulas->add_option("--beta", f_beta, "Integral means spectrum value beta(-q)");
  formulas->add_option("--p", f_p, "Integral means exponent");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, ee;
    const int code = app.exit(e, o, ee);
    out << o.str();
    err << ee.str();
    return code == 0 ? kOk : kConfigError;
  }

  const Logger log{err, ov.verbosity};
  try {
    if (formulas->parsed()) {
      print_formulas(*formulas, f_K, f_t, f_tp, f_dim, f_q, f_beta, f_p, out);
      return kOk;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--config")) ov.config = config_path;
    if (sub->count("--out")) ov.out = out_dir;
    if (sub->count("--levels")) ov.levels = levels;
    if (sub->count("--K")) ov.K = K;
    if (sub->count("--seed")) ov.seed = seed;

    Json doc = Json::object();
    if (ov.config) {
      try {
        doc = Json::parse(io::read_text(*ov.config));
      } catch (const Json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", ov.config->string(), e.what()));
      }
    }
    RunConfig cfg = parse_config(doc, ov);

    Artifacts files(std::set<std::string>(formats.begin(), formats.end()));
    Json summary = Json::object();
    int code = kOk;

    if (means->parsed()) {
      MeansConfig mc = cfg.means.value_or(MeansConfig{});
      if (!cfg.means && map_name.empty()) throw ConfigError("means: give --map or a \"means\" block in the config");
      if (!map_name.empty()) {
        Json desc = {{"name", map_name}};
        if (means->count("--b")) desc["b"] = b;
        mc.map = map_from_json(desc);
      }
      if (means->count("--p")) mc.p = p;
      if (means->count("--j-min")) mc.j_min = j_min;
      if (means->count("--j-max")) mc.j_max = j_max;
      if (means->count("--K")) mc.K = K;
      if (mc.j_min < 1 || mc.j_max > 24 || mc.j_max - mc.j_min + 1 < 5)
        throw ConfigError("means: need 1 <= j_min, j_max <= 24 and at least 5 radii");
      if (!(mc.K >= 1.0)) throw ConfigError("means: K must be >= 1");

      const BetaEstimate est = beta_estimate(mc.map, mc.p, mc.j_min, mc.j_max);
      files.add("means.csv", io::means_csv(est, mc.p, mc.K));
      Json mj = io::to_json(est);
      mj["map"] = mc.map.name();
      mj["p"] = mc.p;
      mj["K"] = mc.K;
      mj["pommerenke_bound"] = pommerenke_bound(mc.K, mc.p);
      mj["brennan_reference"] = brennan_reference(mc.K, mc.p);
      files.add("means.json", io::dump(mj));
      if (mc.classification) {
        const auto fam = BoundaryDiskFamily::dyadic(mc.classification->k);
        const auto cls = classify_indices(fam, mc.map, mc.classification->alpha, mc.classification->delta);
        const auto sum = good_sum_check(fam, mc.map, mc.classification->alpha, mc.classification->delta);
        Json cj = io::classification_json(fam, cls);
        cj["good_sum"] = {{"lhs", sum.lhs}, {"rhs", sum.rhs}, {"ratio", sum.ratio}};
        files.add("classification.json", io::dump(cj));
      }
      out << fmt::format("beta = {} (fit residual {}{})\n", io::format_number(est.beta),
                         io::format_number(est.fit_residual), est.low_confidence ? ", low confidence" : "");
    } else if (analyze->parsed()) {
      if (cfg.tree) {
        run_analysis(cfg, *cfg.tree, files, summary, log);
      } else {
        const BuildResult r = run_construction(cfg, files, summary, log);
        run_analysis(cfg, r.tree, files, summary, log);
      }
      files.add("analysis.json", io::dump(summary));
      out << fmt::format("analyze: {} files\n", files.size());
    } else {
      if (cfg.tree_path) throw ConfigError("construct and verify build their own tree; drop \"tree\"");
      const BuildResult r = run_construction(cfg, files, summary, log);
      if (construct->parsed()) {
        files.add("run.json", io::dump(summary));
        out << fmt::format("construct: depth {}, max |residual| {}, {} files\n", r.tree.depth(),
                           io::format_number(summary["construct"]["max_abs_residual"].get<double>()), files.size());
      } else {
        const AnalysisResult a = run_analysis(cfg, r.tree, files, summary, log);
        const NormalizationReport rep = normalization_report(r.tree);
        std::vector<Check> checks;
        checks.push_back({"normalization_residual", rep.max_abs_residual_equation < 1e-8,
                          rep.max_abs_residual_equation, 1e-8});
        if (r.materialized_depth > 0) {
          const double e = boundary_error(r);
          checks.push_back({"boundary_to_image_circle", e <= 1e-9, e, 1e-9});
        }
        if (cfg.build.enforce_shrink_rule) {
          double worst = 0.0;
          for (const auto& row : rep.rows) worst = std::max(worst, row.eps_prime * row.eps_prime / row.shrink_bound);
          checks.push_back({"shrink_bound_ratio", worst <= 1.0, worst, 1.0});
        }
        if (a.inequality && a.inequality->rows.size() >= 2) {
          checks.push_back({"content_ratio_variation", a.inequality->variation < 3.0, a.inequality->variation, 3.0});
          checks.push_back({"content_growth_exponent", std::abs(a.inequality->growth_exponent) <= 0.05,
                            a.inequality->growth_exponent, 0.05});
        }
        if (a.critical && a.image_fit) {
          const double dev = std::abs(a.image_fit->fitted_dimension - 1.0);
          checks.push_back({"image_dimension_within_slack", dev <= a.image_slack, dev, a.image_slack});
        }
        Json cj = Json::array();
        bool all = true;
        for (const auto& c : checks) {
          all = all && c.passed;
          cj.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}});
          out << fmt::format("{} {} value={} tolerance={}\n", c.passed ? "PASS" : "FAIL", c.name,
                             io::format_number(c.value), io::format_number(c.tolerance));
        }
        summary["checks"] = std::move(cj);
        summary["passed"] = all;
        files.add("verify.json", io::dump(summary));
        code = all ? kOk : kChecksFailed;
      }
    }

    files.write(cfg.out);
    log.info("wrote {} files to {}", files.size(), cfg.out.string());
    return code;
  } catch (const ConfigError& e) {
    err << "qcdist: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "qcdist: invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const InfeasibleError& e) {
    err << "qcdist: infeasible: " << e.what() << " (required m multiplier "
        << io::format_number(e.required_multiplier()) << ")\n";
    return kInfeasible;
  } catch (const PackingError& e) {
    err << "qcdist: infeasible packing: " << e.what() << '\n';
    return kInfeasible;
  } catch (const PrecisionError& e) {
    err << "qcdist: precision failure: " << e.what() << '\n';
    return kPrecision;
  } catch (const BoundaryError& e) {
    err << "qcdist: precision failure: " << e.what() << '\n';
    return kPrecision;
  } catch (const std::exception& e) {
    err << "qcdist: error: " << e.what() << '\n';
    return kChecksFailed;
  }
}

}  // namespace qcdist::cli
