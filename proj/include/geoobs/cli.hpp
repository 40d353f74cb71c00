#pragma once

#include <iosfwd>

namespace geoobs {

// Entry point of the geoobs tool. Returns 0 on success, 1 on validation errors, 2 on computation
// errors; errors are reported as a JSON object on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoobs
