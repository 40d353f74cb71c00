#include "geoobs/surface_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "geoobs/errors.hpp"
#include "report_json.hpp"

namespace geoobs {

namespace {

using detail::Json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, "surface JSON: " + what); }

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(what + " must be finite");
  return v;
}

BivariateSeries series_from(const Json& j) {
  if (!j.is_object()) bad("series must be an object");
  if (!j.contains("order") || !j["order"].is_number_integer() || j["order"].get<long>() < 0)
    bad("\"order\" must be a non-negative integer");
  const int order = j["order"].get<int>();
  if (!j.contains("terms") || !j["terms"].is_array()) bad("\"terms\" must be an array");
  std::vector<Term> terms;
  for (const auto& t : j["terms"]) {
    if (!t.is_object()) bad("each term must be an object");
    for (const char* k : {"i", "j"})
      if (!t.contains(k) || !t[k].is_number_integer() || t[k].get<long>() < 0)
        bad(std::string("term exponent \"") + k + "\" must be a non-negative integer");
    if (!t.contains("c")) bad("term is missing \"c\"");
    Term term{t["i"].get<int>(), t["j"].get<int>(), number(t["c"], "term coefficient")};
    if (term.i + term.j > order) bad("term degree exceeds \"order\"");
    terms.push_back(term);
  }
  return BivariateSeries::from_terms(order, terms);
}

Json series_json(const BivariateSeries& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms()) terms.push_back({{"i", t.i}, {"j", t.j}, {"c", t.c}});
  return {{"order", s.order()}, {"terms", terms}};
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    bad(std::string("parse error: ") + e.what());
  }
}

}  // namespace

BivariateSeries series_from_json(const std::string& text) { return series_from(parse(text)); }

std::string series_to_json(const BivariateSeries& s) { return detail::dump_stable(series_json(s)); }

Surface surface_from_json(const std::string& text) {
  const Json j = parse(text);
  if (!j.is_object()) bad("top level must be an object");
  if (!j.contains("g")) bad("missing \"g\"");
  BivariateSeries g = series_from(j["g"]);
  double r = 0.5;
  if (j.contains("chart_radius")) r = number(j["chart_radius"], "chart_radius");
  Frame f;
  if (j.contains("frame")) {
    const Json& fj = j["frame"];
    if (!fj.is_object()) bad("\"frame\" must be an object");
    Mat3 R = Mat3::Identity();
    Vec3 o = Vec3::Zero();
    if (fj.contains("rotation")) {
      const Json& rj = fj["rotation"];
      if (!rj.is_array() || rj.size() != 3) bad("rotation must be a 3x3 array");
      for (int a = 0; a < 3; ++a) {
        if (!rj[a].is_array() || rj[a].size() != 3) bad("rotation must be a 3x3 array");
        for (int b = 0; b < 3; ++b) R(a, b) = number(rj[a][b], "rotation entry");
      }
    }
    if (fj.contains("origin")) {
      const Json& oj = fj["origin"];
      if (!oj.is_array() || oj.size() != 3) bad("origin must have three entries");
      for (int a = 0; a < 3; ++a) o[a] = number(oj[a], "origin entry");
    }
    f = Frame::make(R, o);
  }
  return Surface(std::move(g), f, r);
}

std::string surface_to_json(const Surface& s) {
  Json rot = Json::array();
  for (int a = 0; a < 3; ++a)
    rot.push_back(Json::array({s.frame().rotation(a, 0), s.frame().rotation(a, 1), s.frame().rotation(a, 2)}));
  Json j{{"g", series_json(s.g())},
         {"chart_radius", s.chart_radius()},
         {"frame", {{"rotation", rot}, {"origin", detail::vec_json(s.frame().origin)}}}};
  return detail::dump_stable(j);
}

Surface load_surface(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot read surface file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return surface_from_json(ss.str());
}

}  // namespace geoobs
