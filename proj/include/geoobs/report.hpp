#pragma once

#include <string>

#include "geoobs/harness.hpp"
#include "geoobs/tracer.hpp"

namespace geoobs {

enum class ReportFormat { Json, Csv };

// Byte-stable text forms: sorted keys, doubles with 17 significant digits.
std::string to_json_text(const SweepReport& r);
std::string to_json_text(const CascadeReport& r);
std::string to_json_text(const TraceResult& t);
std::string to_csv_text(const SweepReport& r);    // direction,intervals,switches,termination
std::string to_csv_text(const CascadeReport& r);  // eps,count
std::string samples_csv(const TraceResult& t);    // s,x,y,z,kind

void export_report(const SweepReport& r, const std::string& path, ReportFormat format);
void export_report(const CascadeReport& r, const std::string& path, ReportFormat format);

// Writes the whole file or throws IoFailure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace geoobs
