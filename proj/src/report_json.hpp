#pragma once

#include <json.hpp>
#include <string>

#include "geoobs/harness.hpp"
#include "geoobs/tracer.hpp"

namespace geoobs::detail {

using Json = nlohmann::json;

// Indented dump with sorted keys and "%.17g" numbers; non-finite numbers become null.
std::string dump_stable(const Json& j);
std::string number_text(double x);

Json vec_json(const Vec3& v);
Json limits_json(const TraceLimits& l);
Json to_json(const SweepReport& r);
Json to_json(const CascadeReport& r);
Json to_json(const TraceResult& t);

}  // namespace geoobs::detail
