#include "geoobs/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "geoobs/classifier.hpp"
#include "geoobs/errors.hpp"
#include "geoobs/harness.hpp"
#include "geoobs/report.hpp"
#include "geoobs/surface_io.hpp"
#include "report_json.hpp"

namespace geoobs {

namespace {

using detail::Json;

// Raised for bad parameter values; maps to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string surface, surface2;
  std::vector<double> start{0.0, 0.0};
  std::vector<double> from, to;
  double dir = 0.0;
  double eps = 0.05;
  std::vector<double> eps_list{0.1, 0.05, 0.02, 0.01, 0.005};
  double ds = 1e-4;
  int max_segments = 64;
  long max_steps = 2'000'000;
  int n_dirs = 360;
  int order = kDefaultOrder;
  double delta = 0.0;
  int on = 1;
  bool no_refine = false;
  double tol = 1e-6;
  std::string out, format = "json", in;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

void validate_common(const RunConfig& c) {
  require(c.eps > 0 && std::isfinite(c.eps), "eps must be a positive number");
  require(c.ds > 0 && c.ds <= 0.1, "ds must be in (0, 0.1]");
  require(c.max_segments >= 1, "max-segments must be >= 1");
  require(c.max_steps >= 1, "max-steps must be >= 1");
  require(c.order >= 2 && c.order <= 30, "order must be in [2, 30]");
  require(c.format == "json" || c.format == "csv", "format must be json or csv");
  require(c.on == 1 || c.on == 2, "on must be 1 or 2");
  require(c.on == 1 || !c.surface2.empty(), "on = 2 needs --surface2");
}

TraceLimits limits_of(const RunConfig& c) {
  TraceLimits l;
  l.ds = c.ds;
  l.max_segments = c.max_segments;
  l.max_steps = c.max_steps;
  return l;
}

std::vector<Surface> load_surfaces(const RunConfig& c) {
  require(!c.surface.empty(), "surface is required");
  std::vector<Surface> s{load_surface(c.surface)};
  if (!c.surface2.empty()) s.push_back(load_surface(c.surface2));
  return s;
}

Json run_echo(const std::string& sub, const RunConfig& c) {
  Json j{{"subcommand", sub}, {"surface", c.surface}, {"order", c.order}};
  j["surface2"] = c.surface2.empty() ? Json(nullptr) : Json(c.surface2);
  if (sub == "trace" || sub == "cascade") {
    j["start"] = c.start;
    j["dir"] = c.dir;
    j["on"] = c.on;
  }
  if (sub == "trace" || sub == "sweep") j["eps"] = c.eps;
  if (sub == "cascade") j["eps_list"] = c.eps_list;
  if (sub == "sweep") {
    j["n_dirs"] = c.n_dirs;
    j["refine"] = !c.no_refine;
    j["point"] = c.start;
  }
  if (sub == "shoot") {
    j["from"] = c.from;
    j["to"] = c.to;
    j["tol"] = c.tol;
  }
  if (sub == "classify") j["delta"] = c.delta;
  if (sub != "classify") {
    j["ds"] = c.ds;
    j["max_segments"] = c.max_segments;
    j["max_steps"] = c.max_steps;
  }
  j["format"] = c.format;
  return j;
}

void emit(const std::string& text, const RunConfig& c, std::ostream& out) {
  if (c.out.empty())
    out << text;
  else
    write_text_file(c.out, text);
}

// point on surface `index` above chart point (x, y), in world coordinates
Vec3 surface_point(const std::vector<Surface>& s, int index, const std::vector<double>& xy) {
  const auto& surf = s[index];
  return surf.frame().to_world(Vec3(xy[0], xy[1], surf.height(xy[0], xy[1])));
}

Json classify_json(const RunConfig& c) {
  const auto s = load_surfaces(c);
  Json j;
  if (s.size() == 1) {
    const BivariateSeries g = s[0].g().truncated(c.order);
    const HessianClass h = hessian_classify(g);
    const BoundPrediction p = predict_bound(h);
    j = Json{{"kind", "single"},
             {"shape", std::string(to_string(h.shape))},
             {"a", h.a},
             {"b", h.b},
             {"rotation", Json::array({h.rotation.c, h.rotation.s})},
             {"prediction", {{"quantity", p.quantity}, {"note", p.note}}}};
    j["prediction"]["bound"] = p.bound ? Json(*p.bound) : Json(nullptr);
    try {
      const auto w = wedge_decompose(g);
      Json sectors = Json::array();
      for (const auto& sec : w.sectors)
        sectors.push_back({{"begin", sec.begin}, {"end", sec.end}, {"sign", std::string(to_string(sec.sign))}});
      j["wedge"] = {{"degree", w.degree}, {"boundary_angles", w.boundary_angles}, {"sectors", sectors}};
    } catch (const Error&) {
      j["wedge"] = nullptr;
    }
    if (h.shape == Shape::Saddle) {
      const double th0 = theta0(h.a, h.b);
      const double lim = delta_limit(th0);
      require(std::abs(c.delta) <= lim, fmt::format("delta must satisfy |delta| <= {:.17g}", lim));
      const auto sc = saddle_case(g, c.delta);
      Json samples = Json::array();
      for (int k = -4; k <= 4; ++k) {
        const double d = lim * k / 4.0 * 0.999;
        samples.push_back(Json::array({d, saddle_case(g, d).a2}));
      }
      j["theta0"] = th0;
      j["saddle"] = {{"delta", sc.delta},
                     {"a2", sc.a2},
                     {"leading", sc.leading},
                     {"leading_exponent", sc.leading_exponent},
                     {"case", std::string(to_string(sc.saddle_case))},
                     {"predicted_max_switch_points", sc.predicted_max_switch_points},
                     {"predicted_max_intervals", sc.predicted_max_intervals},
                     {"a2_samples", samples}};
    }
  } else {
    const auto t = classify_two_surfaces(s[0], s[1], surface_point(s, 0, c.start), c.order);
    auto opt_int = [](const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); };
    const BoundPrediction p = predict_bound(t);
    j = Json{{"kind", "two_surface"},
             {"k1", t.normalized.k1},
             {"k2", t.normalized.k2},
             {"angle", t.normalized.angle == AngleClass::Acute ? "acute" : "obtuse"},
             {"tilt", t.normalized.tilt},
             {"M", opt_int(t.curve.M)},
             {"aM", t.curve.aM},
             {"N", opt_int(t.nf1.N)},
             {"a00", t.nf1.a00},
             {"N_tilde", opt_int(t.nf2.N)},
             {"a00_tilde", t.nf2.a00},
             {"case_label", std::string(to_string(t.label))},
             {"prediction", {{"quantity", p.quantity}, {"note", p.note}}}};
    j["prediction"]["bound"] = p.bound ? Json(*p.bound) : Json(nullptr);
  }
  j["run"] = run_echo("classify", c);
  return j;
}

GeodesicState start_state(const std::vector<Surface>& s, const RunConfig& c) {
  return tangent_state(s, c.on - 1, c.start[0], c.start[1], c.dir);
}

int dispatch(const std::string& sub, const RunConfig& c, std::ostream& out) {
  if (sub == "classify") {
    emit(detail::dump_stable(classify_json(c)), c, out);
    return 0;
  }
  if (sub == "plot") {
    require(!c.in.empty(), "in is required");
    std::ifstream f(c.in, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot read " + c.in);
    std::stringstream ss;
    ss << f.rdbuf();
    Json j;
    try {
      j = Json::parse(ss.str());
    } catch (const Json::parse_error&) {
      throw ValidationError("in must be a trace JSON file");
    }
    require(j.contains("samples") && j["samples"].is_array(), "in must contain a samples array");
    std::string csv = "s,x,y,z,kind\n";
    const bool has_kinds = j.contains("sample_kinds") && j["sample_kinds"].size() == j["samples"].size();
    for (size_t i = 0; i < j["samples"].size(); ++i) {
      const auto& row = j["samples"][i];
      require(row.is_array() && row.size() == 4, "each sample must be [s,x,y,z]");
      csv += fmt::format("{},{},{},{},{}\n", detail::number_text(row[0].get<double>()),
                         detail::number_text(row[1].get<double>()), detail::number_text(row[2].get<double>()),
                         detail::number_text(row[3].get<double>()),
                         has_kinds ? j["sample_kinds"][i].get<std::string>() : std::string());
    }
    emit(csv, c, out);
    return 0;
  }

  validate_common(c);
  const auto s = load_surfaces(c);
  const TraceLimits lim = limits_of(c);

  if (sub == "trace") {
    const TraceResult t = trace(start_state(s, c), s, c.eps, lim);
    if (c.format == "csv") {
      emit(samples_csv(t), c, out);
    } else {
      Json j = detail::to_json(t);
      j["run"] = run_echo(sub, c);
      emit(detail::dump_stable(j), c, out);
    }
    return 0;
  }
  if (sub == "sweep") {
    require(c.n_dirs >= 4, "n-dirs must be >= 4");
    SweepConfig cfg;
    cfg.n_dirs = c.n_dirs;
    cfg.eps = c.eps;
    cfg.limits = lim;
    cfg.refine = !c.no_refine;
    const SweepReport r = sweep_directions(s, surface_point(s, 0, c.start), cfg);
    if (c.format == "csv") {
      emit(to_csv_text(r), c, out);
    } else {
      Json j = detail::to_json(r);
      j["run"] = run_echo(sub, c);
      emit(detail::dump_stable(j), c, out);
    }
    out << fmt::format("max_intervals={} max_switches={} within_bound={}\n", r.max_interval_count,
                       r.max_switch_count, r.all_within_bound ? "true" : "false");
    return 0;
  }
  if (sub == "cascade") {
    require(c.eps_list.size() >= 3, "eps-list needs at least three values");
    for (size_t i = 0; i < c.eps_list.size(); ++i) {
      require(c.eps_list[i] > 0, "eps-list values must be positive");
      require(i == 0 || c.eps_list[i] < c.eps_list[i - 1], "eps-list must be strictly descending");
    }
    const CascadeReport r = epsilon_cascade(s, start_state(s, c), c.eps_list, lim);
    if (c.format == "csv") {
      emit(to_csv_text(r), c, out);
    } else {
      Json j = detail::to_json(r);
      j["run"] = run_echo(sub, c);
      emit(detail::dump_stable(j), c, out);
    }
    if (!c.out.empty()) out << fmt::format("stabilized={}\n", r.stabilized ? "true" : "false");
    return 0;
  }
  if (sub == "shoot") {
    require(c.from.size() == 3, "from must be x,y,z");
    require(c.to.size() == 3, "to must be x,y,z");
    require(c.tol > 0, "tol must be positive");
    const ShootResult r = shoot_between(Vec3(c.from[0], c.from[1], c.from[2]), Vec3(c.to[0], c.to[1], c.to[2]),
                                        s, c.tol, lim);
    Json j = detail::to_json(r.trace);
    j["length"] = r.length;
    j["miss"] = r.miss;
    j["run"] = run_echo(sub, c);
    emit(detail::dump_stable(j), c, out);
    return 0;
  }
  throw ValidationError("unknown subcommand " + sub);
}

void error_json(std::ostream& err, const std::string& code, const std::string& msg, int exit_code) {
  Json j{{"error", {{"code", code}, {"message", msg}, {"exit_code", exit_code}}}};
  err << j.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"geoobs: geodesics around analytic obstacles"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with default option values; flags take precedence");
  RunConfig c;

  auto add_surfaces = [&](CLI::App* sub, bool two = true) {
    sub->add_option("--surface", c.surface, "surface JSON file")->required();
    if (two) sub->add_option("--surface2", c.surface2, "second surface JSON file");
  };
  auto add_limits = [&](CLI::App* sub) {
    sub->add_option("--ds", c.ds, "boundary step length");
    sub->add_option("--max-segments", c.max_segments, "segment cap per trace");
    sub->add_option("--max-steps", c.max_steps, "boundary step cap per trace");
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "output file (default: standard output)");
    sub->add_option("--format", c.format, "json or csv");
  };
  auto xy = [&](CLI::App* sub, const std::string& name, std::vector<double>& v, int n, const std::string& help) {
    return sub->add_option(name, v, help)->delimiter(',')->expected(n);
  };

  auto* classify = app.add_subcommand("classify", "classify the local geometry at the chart origin");
  add_surfaces(classify);
  classify->add_option("--order", c.order, "series working order");
  classify->add_option("--delta", c.delta, "saddle offset from the asymptote");
  xy(classify, "--start", c.start, 2, "x,y on the first surface (two-surface point)");
  add_out(classify);

  auto* tr = app.add_subcommand("trace", "trace one geodesic from a tangent start");
  add_surfaces(tr);
  xy(tr, "--start", c.start, 2, "x,y in the start surface chart");
  tr->add_option("--dir", c.dir, "heading angle in the chart plane, radians");
  tr->add_option("--on", c.on, "surface the start lies on (1 or 2)");
  tr->add_option("--eps", c.eps, "ball radius");
  add_limits(tr);
  add_out(tr);

  auto* sw = app.add_subcommand("sweep", "trace every tangent direction at a boundary point");
  add_surfaces(sw);
  xy(sw, "--point", c.start, 2, "x,y of the start point on the first surface");
  sw->add_option("--n-dirs", c.n_dirs, "number of equally spaced directions");
  sw->add_option("--eps", c.eps, "ball radius");
  sw->add_flag("--no-refine", c.no_refine, "skip extra directions around wedge boundaries");
  add_limits(sw);
  add_out(sw);

  auto* ca = app.add_subcommand("cascade", "count switch points in shrinking balls");
  add_surfaces(ca);
  xy(ca, "--start", c.start, 2, "x,y in the start surface chart");
  ca->add_option("--dir", c.dir, "heading angle, radians");
  ca->add_option("--on", c.on, "surface the start lies on (1 or 2)");
  ca->add_option("--eps-list", c.eps_list, "descending radii")->delimiter(',');
  add_limits(ca);
  add_out(ca);

  auto* sh = app.add_subcommand("shoot", "shortest path between two points by shooting");
  add_surfaces(sh);
  xy(sh, "--from", c.from, 3, "x,y,z of the first point")->required();
  xy(sh, "--to", c.to, 3, "x,y,z of the second point")->required();
  sh->add_option("--tol", c.tol, "allowed miss distance");
  add_limits(sh);
  add_out(sh);

  auto* pl = app.add_subcommand("plot", "convert trace samples to CSV");
  pl->add_option("--in", c.in, "trace JSON file")->required();
  pl->add_option("--out", c.out, "CSV file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "InvalidArgument", e.what(), 1);
    return 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return dispatch(sub, c, out);
  } catch (const ValidationError& e) {
    error_json(err, "InvalidArgument", e.what(), 1);
    return 1;
  } catch (const Error& e) {
    const int code = e.code() == ErrorCode::InvalidInput ? 1 : 2;
    error_json(err, std::string(to_string(e.code())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    error_json(err, "Internal", e.what(), 2);
    return 2;
  }
}

}  // namespace geoobs
