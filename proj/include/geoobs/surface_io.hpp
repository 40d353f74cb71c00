#pragma once

#include <string>

#include "geoobs/geometry.hpp"

namespace geoobs {

// {"order": 12, "terms": [{"i": 2, "j": 0, "c": 1.0}, ...]}
BivariateSeries series_from_json(const std::string& text);
std::string series_to_json(const BivariateSeries& s);

// {"g": <series>, "chart_radius": 0.5, "frame": {"rotation": [[..],[..],[..]], "origin": [x,y,z]}}
// chart_radius and frame are optional.
Surface surface_from_json(const std::string& text);
std::string surface_to_json(const Surface& s);

// Reads a surface file; IoFailure when unreadable, InvalidInput when malformed.
Surface load_surface(const std::string& path);

}  // namespace geoobs
