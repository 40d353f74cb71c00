#include "geoobs/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "geoobs/errors.hpp"
#include "report_json.hpp"

namespace geoobs {

namespace detail {

std::string number_text(double x) {
  if (!std::isfinite(x)) return "null";
  return fmt::format("{:.17g}", x);
}

namespace {

void dump_into(const Json& j, int indent, std::string& out) {
  const std::string pad(indent + 2, ' '), close(indent, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), indent + 2, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_into(e, indent + 2, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += number_text(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_stable(const Json& j) {
  std::string out;
  dump_into(j, 0, out);
  out += "\n";
  return out;
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json limits_json(const TraceLimits& l) {
  return Json{{"ds", l.ds},
              {"max_segments", l.max_segments},
              {"max_steps", l.max_steps},
              {"event_tol", l.event_tol},
              {"liftoff_tol", l.liftoff_tol},
              {"tangency_tol", l.tangency_tol},
              {"deadband", l.deadband},
              {"graze_tol", l.graze_tol},
              {"sample_stride", l.sample_stride}};
}

Json to_json(const SweepReport& r) {
  Json records = Json::array();
  for (const auto& x : r.records)
    records.push_back({{"direction", x.direction},
                       {"surface", x.surface + 1},
                       {"feasible", x.feasible},
                       {"intervals", x.intervals},
                       {"switches", x.switches},
                       {"termination", std::string(to_string(x.termination))},
                       {"within_bound", x.within_bound},
                       {"alternation_ok", x.alternation_ok},
                       {"invariants_ok", x.invariants_ok}});
  Json pred{{"quantity", r.prediction.quantity}, {"note", r.prediction.note}};
  pred["bound"] = r.prediction.bound ? Json(*r.prediction.bound) : Json(nullptr);
  return Json{{"config",
               {{"n_dirs", r.config.n_dirs},
                {"eps", r.config.eps},
                {"refine", r.config.refine},
                {"limits", limits_json(r.config.limits)},
                {"point", vec_json(r.point)},
                {"surface_count", r.surface_count}}},
              {"records", records},
              {"max_interval_count", r.max_interval_count},
              {"max_switch_count", r.max_switch_count},
              {"prediction", pred},
              {"all_within_bound", r.all_within_bound},
              {"invariants_ok", r.invariants_ok}};
}

Json to_json(const CascadeReport& r) {
  Json start{{"position", vec_json(r.start.position)},
             {"velocity", vec_json(r.start.velocity)},
             {"surface", r.start.on_surface() ? Json(r.start.surface + 1) : Json(nullptr)}};
  return Json{{"eps", r.eps},
              {"counts", r.counts},
              {"stabilized", r.stabilized},
              {"monotone", r.monotone},
              {"termination", std::string(to_string(r.termination))},
              {"config", {{"limits", limits_json(r.limits)}, {"start", start}}}};
}

Json to_json(const TraceResult& t) {
  Json segs = Json::array();
  for (const auto& s : t.segments) {
    Json j{{"kind", std::string(to_string(s.kind))},
           {"s0", s.s_start},
           {"s1", s.s_end},
           {"p0", vec_json(s.start)},
           {"p1", vec_json(s.end)}};
    j["surface"] = s.kind == SegmentKind::Boundary ? Json(s.surface + 1) : Json(nullptr);
    j["line_slope"] = s.line_slope ? Json(*s.line_slope) : Json(nullptr);
    segs.push_back(j);
  }
  auto surf = [](int k) { return k == kInterior ? Json(nullptr) : Json(k + 1); };
  Json sps = Json::array();
  for (const auto& sp : t.switch_points)
    sps.push_back({{"s", sp.s},
                   {"point", vec_json(sp.point)},
                   {"from", std::string(to_string(sp.from_kind))},
                   {"to", std::string(to_string(sp.to_kind))},
                   {"from_surface", surf(sp.from_surface)},
                   {"to_surface", surf(sp.to_surface)},
                   {"velocity", vec_json(sp.velocity)},
                   {"turn_angle", sp.turn_angle},
                   {"ambiguous", sp.ambiguous}});
  Json samples = Json::array(), kinds = Json::array();
  for (const auto& s : t.samples) {
    samples.push_back(Json::array({s.s, s.point.x(), s.point.y(), s.point.z()}));
    kinds.push_back(std::string(to_string(s.kind)));
  }
  return Json{{"segments", segs},
              {"switch_points", sps},
              {"termination", std::string(to_string(t.termination))},
              {"samples", samples},
              {"sample_kinds", kinds},
              {"interval_count", t.interval_count()},
              {"switch_count", t.switch_count()},
              {"config", {{"eps", t.eps}, {"limits", limits_json(t.limits)}, {"origin", vec_json(t.origin)}}},
              {"diagnostics",
               {{"max_speed_drift", t.max_speed_drift},
                {"max_surface_residual", t.max_surface_residual},
                {"min_boundary_curvature", t.min_boundary_curvature},
                {"max_turn_angle", t.max_turn_angle},
                {"steps", t.steps}}}};
}

}  // namespace detail

std::string to_json_text(const SweepReport& r) { return detail::dump_stable(detail::to_json(r)); }
std::string to_json_text(const CascadeReport& r) { return detail::dump_stable(detail::to_json(r)); }
std::string to_json_text(const TraceResult& t) { return detail::dump_stable(detail::to_json(t)); }

std::string to_csv_text(const SweepReport& r) {
  std::string out = "direction,intervals,switches,termination\n";
  for (const auto& x : r.records) {
    if (!x.feasible) continue;
    out += fmt::format("{},{},{},{}\n", detail::number_text(x.direction), x.intervals, x.switches,
                       to_string(x.termination));
  }
  return out;
}

std::string to_csv_text(const CascadeReport& r) {
  std::string out = "eps,count\n";
  for (size_t i = 0; i < r.eps.size(); ++i) out += fmt::format("{},{}\n", detail::number_text(r.eps[i]), r.counts[i]);
  return out;
}

std::string samples_csv(const TraceResult& t) {
  std::string out = "s,x,y,z,kind\n";
  for (const auto& s : t.samples)
    out += fmt::format("{},{},{},{},{}\n", detail::number_text(s.s), detail::number_text(s.point.x()),
                       detail::number_text(s.point.y()), detail::number_text(s.point.z()), to_string(s.kind));
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  f << content;
  f.close();
  if (!f) throw Error(ErrorCode::IoFailure, "failed writing " + path);
}

void export_report(const SweepReport& r, const std::string& path, ReportFormat format) {
  write_text_file(path, format == ReportFormat::Json ? to_json_text(r) : to_csv_text(r));
}

void export_report(const CascadeReport& r, const std::string& path, ReportFormat format) {
  write_text_file(path, format == ReportFormat::Json ? to_json_text(r) : to_csv_text(r));
}

}  // namespace geoobs
