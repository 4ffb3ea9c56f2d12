#pragma once

// Serialized run artifacts: report JSON, trace CSV and an SVG figure.
// All writers are deterministic for identical reports.

#include <filesystem>
#include <string>

#include "ppe/aps.hpp"

namespace ppe {

struct ArtifactOptions {
  // Wall-clock timings differ between runs; they are written only on request.
  bool include_timing = false;
};

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string report_to_json(const Report& report, const ArtifactOptions& opts = {});
Report report_from_json(const std::string& text);

// iteration,vertex_count,area,area_diff,hausdorff_diff,wall_ms,vertices
// with vertices dumped as "x1:y1;x2:y2;...".
std::string trace_to_csv(const Report& report, const ArtifactOptions& opts = {});

// Initial set as an outline, final set filled, with labelled payoff axes.
std::string render_svg(const PolygonV& initial, const PolygonV& final_set);

// Writes text to path; throws std::runtime_error on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ppe
