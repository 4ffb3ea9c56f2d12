#include "ppe/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ppe {
namespace {

using json = nlohmann::json;

json vertices_json(const PolygonV& p) {
  json arr = json::array();
  for (Point2 v : p.vertices) arr.push_back({v.x, v.y});
  return arr;
}

PolygonV vertices_from_json(const json& arr) {
  PolygonV p;
  for (const auto& v : arr) p.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  return p;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string report_to_json(const Report& report, const ArtifactOptions& opts) {
  json root;
  const auto& c = report.config;
  root["config"] = {{"delta", c.delta},
                    {"epsilon", c.epsilon},
                    {"theta", c.theta},
                    {"max_iter", c.max_iter},
                    {"hausdorff_epsilon", c.hausdorff_epsilon},
                    {"vertex_cap", c.vertex_cap}};
  root["tolerances"] = {{"eps_point", report.tol.eps_point}, {"eps_side", report.tol.eps_side}};
  json trace = json::array();
  for (const auto& it : report.trace) {
    json e = {{"iteration", it.iteration},
              {"vertices", vertices_json(it.set)},
              {"area", it.area},
              {"area_diff", it.area_diff},
              {"hausdorff_diff", it.hausdorff_diff},
              {"enforceable", it.enforceable},
              {"dd_vertices", it.dd_vertices}};
    if (opts.include_timing) e["wall_ms"] = it.wall_ms;
    trace.push_back(std::move(e));
  }
  root["trace"] = std::move(trace);
  root["iterations"] = report.iterations();
  root["final_vertices"] = vertices_json(report.final_set);
  root["final_area"] = area(report.final_set);
  root["stop_reason"] = to_string(report.stop_reason);
  root["converged"] = report.converged;
  if (report.stop_reason == StopReason::empty_set) {
    root["interpretation"] =
        "no pure-strategy perfect public equilibrium payoff survives the iteration";
  } else {
    root["interpretation"] =
        "final set is an outer bound on the perfect public equilibrium payoffs "
        "(within the recorded tolerances)";
  }
  return root.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  json root = json::parse(text);
  Report r;
  const auto& c = root.at("config");
  r.config.delta = c.at("delta").get<double>();
  r.config.epsilon = c.at("epsilon").get<double>();
  r.config.theta = c.at("theta").get<double>();
  r.config.max_iter = c.at("max_iter").get<int>();
  r.config.hausdorff_epsilon = c.at("hausdorff_epsilon").get<double>();
  r.config.vertex_cap = c.at("vertex_cap").get<std::size_t>();
  r.tol.eps_point = root.at("tolerances").at("eps_point").get<double>();
  r.tol.eps_side = root.at("tolerances").at("eps_side").get<double>();
  for (const auto& e : root.at("trace")) {
    IterationTrace it;
    it.iteration = e.at("iteration").get<int>();
    it.set = vertices_from_json(e.at("vertices"));
    it.area = e.at("area").get<double>();
    it.area_diff = e.at("area_diff").get<double>();
    it.hausdorff_diff = e.at("hausdorff_diff").get<double>();
    it.enforceable = e.at("enforceable").get<std::vector<bool>>();
    it.dd_vertices = e.at("dd_vertices").get<std::size_t>();
    if (e.contains("wall_ms")) it.wall_ms = e.at("wall_ms").get<double>();
    r.trace.push_back(std::move(it));
  }
  r.final_set = vertices_from_json(root.at("final_vertices"));
  auto reason = stop_reason_from_string(root.at("stop_reason").get<std::string>());
  if (!reason) throw std::runtime_error("report: unknown stop_reason");
  r.stop_reason = *reason;
  r.converged = root.at("converged").get<bool>();
  return r;
}

std::string trace_to_csv(const Report& report, const ArtifactOptions& opts) {
  std::ostringstream out;
  out << "iteration,vertex_count,area,area_diff,hausdorff_diff,wall_ms,vertices\n";
  for (const auto& it : report.trace) {
    out << it.iteration << ',' << it.set.size() << ',' << format_double(it.area) << ','
        << format_double(it.area_diff) << ',' << format_double(it.hausdorff_diff) << ','
        << format_double(opts.include_timing ? it.wall_ms : 0.0) << ',';
    for (std::size_t i = 0; i < it.set.size(); ++i) {
      if (i) out << ';';
      out << format_double(it.set.vertices[i].x) << ':' << format_double(it.set.vertices[i].y);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_svg(const PolygonV& initial, const PolygonV& final_set) {
  constexpr double kSize = 600.0, kMargin = 60.0;
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool first = true;
  for (const PolygonV* p : {&initial, &final_set}) {
    for (Point2 v : p->vertices) {
      if (first) {
        lo_x = hi_x = v.x;
        lo_y = hi_y = v.y;
        first = false;
      }
      lo_x = std::min(lo_x, v.x);
      hi_x = std::max(hi_x, v.x);
      lo_y = std::min(lo_y, v.y);
      hi_y = std::max(hi_y, v.y);
    }
  }
  double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  lo_x -= 0.05 * span;
  lo_y -= 0.05 * span;
  span *= 1.1;
  const double scale = (kSize - 2 * kMargin) / span;
  auto px = [&](double x) { return kMargin + (x - lo_x) * scale; };
  auto py = [&](double y) { return kSize - kMargin - (y - lo_y) * scale; };
  auto points_attr = [&](const PolygonV& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) s += ' ';
      s += fixed(px(p.vertices[i].x), 2) + "," + fixed(py(p.vertices[i].y), 2);
    }
    return s;
  };
  auto shape = [&](const PolygonV& p, const std::string& style) -> std::string {
    if (p.empty()) return "";
    if (p.size() == 1)
      return "  <circle cx=\"" + fixed(px(p.vertices[0].x), 2) + "\" cy=\"" +
             fixed(py(p.vertices[0].y), 2) + "\" r=\"5\" " + style + "/>\n";
    if (p.size() == 2)
      return "  <polyline points=\"" + points_attr(p) + "\" " + style + " stroke-width=\"3\"/>\n";
    return "  <polygon points=\"" + points_attr(p) + "\" " + style + "/>\n";
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
         "viewBox=\"0 0 600 600\">\n";
  svg << "  <rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  // Axes frame with payoff ticks at the corners of the view.
  double x0 = kMargin, x1 = kSize - kMargin, y0 = kSize - kMargin, y1 = kMargin;
  svg << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
  if (lo_x < 0 && lo_x + span > 0)
    svg << "  <line x1=\"" << fixed(px(0), 2) << "\" y1=\"" << y0 << "\" x2=\"" << fixed(px(0), 2)
        << "\" y2=\"" << y1 << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  if (lo_y < 0 && lo_y + span > 0)
    svg << "  <line x1=\"" << x0 << "\" y1=\"" << fixed(py(0), 2) << "\" x2=\"" << x1
        << "\" y2=\"" << fixed(py(0), 2) << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  svg << "  <text x=\"" << x0 << "\" y=\"" << y0 + 20 << "\" font-size=\"12\">" << fixed(lo_x)
      << "</text>\n";
  svg << "  <text x=\"" << x1 << "\" y=\"" << y0 + 20
      << "\" font-size=\"12\" text-anchor=\"end\">" << fixed(lo_x + span) << "</text>\n";
  svg << "  <text x=\"" << x0 - 8 << "\" y=\"" << y0
      << "\" font-size=\"12\" text-anchor=\"end\">" << fixed(lo_y) << "</text>\n";
  svg << "  <text x=\"" << x0 - 8 << "\" y=\"" << y1 + 12
      << "\" font-size=\"12\" text-anchor=\"end\">" << fixed(lo_y + span) << "</text>\n";
  svg << "  <text x=\"" << kSize / 2 << "\" y=\"" << kSize - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">payoff of player 1</text>\n";
  svg << "  <text x=\"18\" y=\"" << kSize / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kSize / 2
      << ")\">payoff of player 2</text>\n";
  svg << shape(initial, "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");
  svg << shape(final_set, "fill=\"steelblue\" fill-opacity=\"0.6\" stroke=\"navy\"");
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace ppe
