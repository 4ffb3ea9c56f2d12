#include "ppe/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ppe/game.hpp"
#include "ppe/report.hpp"

namespace ppe::cli {
namespace {

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

struct Loaded {
  StageGame game;
  std::string error;
};

Loaded load_game(const RunSpec& spec) {
  Loaded l;
  std::ifstream f(spec.game_path, std::ios::binary);
  if (!f) {
    l.error = "cannot read game file " + spec.game_path.string();
    return l;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    l.game = parse_game(buf.str(), ParseOptions{spec.enforce_size_caps});
  } catch (const GameError& e) {
    l.error = e.what();
  }
  return l;
}

int exit_code(const Report& r) { return r.converged ? 0 : 2; }

// Runs one solve and writes the selected artifacts into dir.
Report run_into(const StageGame& game, const RunSpec& spec, const SolverConfig& config,
                const std::filesystem::path& dir) {
  Report report = solve(game, config);
  std::filesystem::create_directories(dir);
  ArtifactOptions ao{spec.include_timing};
  if (spec.outputs.contains(Output::report_json))
    write_text_file(dir / "report.json", report_to_json(report, ao));
  if (spec.outputs.contains(Output::trace_csv))
    write_text_file(dir / "trace.csv", trace_to_csv(report, ao));
  if (spec.outputs.contains(Output::svg))
    write_text_file(dir / "payoff_set.svg", render_svg(report.initial_set(), report.final_set));
  return report;
}

}  // namespace

std::set<Output> parse_outputs(const std::string& list) {
  std::set<Output> out;
  for (const auto& item : split(list)) {
    if (item == "report_json") out.insert(Output::report_json);
    else if (item == "trace_csv") out.insert(Output::trace_csv);
    else if (item == "svg") out.insert(Output::svg);
    else throw std::invalid_argument("unknown output \"" + item + "\"");
  }
  if (out.empty()) throw std::invalid_argument("at least one output must be selected");
  return out;
}

std::vector<double> parse_delta_grid(const std::string& list) {
  std::vector<double> out;
  for (const auto& item : split(list)) {
    try {
      out.push_back(parse_number(item));
    } catch (const GameError& e) {
      throw std::invalid_argument(std::string("delta grid: ") + e.what());
    }
  }
  if (out.empty()) throw std::invalid_argument("delta grid is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] >= 0.0 && out[i] < 1.0))
      throw std::invalid_argument("delta grid values must lie in [0, 1)");
    if (i > 0 && !(out[i] > out[i - 1]))
      throw std::invalid_argument("delta grid must be strictly ascending");
  }
  return out;
}

unsigned threads_from_env() {
  const char* v = std::getenv("PPE_THREADS");
  if (!v) return 0;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 0;
  return static_cast<unsigned>(n);
}

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.outputs.empty()) {
    err << "error: no outputs selected\n";
    return 1;
  }
  try {
    spec.config.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  Loaded l = load_game(spec);
  if (!l.error.empty()) {
    err << "error: " << l.error << "\n";
    return 1;
  }
  Report report;
  try {
    report = run_into(l.game, spec, spec.config, spec.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  out << "iterations=" << report.iterations()
      << " final_area=" << format_double(area(report.final_set))
      << " stop_reason=" << to_string(report.stop_reason) << "\n";
  return exit_code(report);
}

int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.delta_values.empty()) {
    err << "error: delta grid is empty\n";
    return 1;
  }
  for (std::size_t i = 1; i < spec.delta_values.size(); ++i) {
    if (!(spec.delta_values[i] > spec.delta_values[i - 1])) {
      err << "error: delta grid must be strictly ascending\n";
      return 1;
    }
  }
  Loaded l = load_game(spec.run);
  if (!l.error.empty()) {
    err << "error: " << l.error << "\n";
    return 1;
  }

  std::ostringstream summary;
  summary << "delta,iterations,final_area,stop_reason\n";
  bool all_ok = true;
  for (double delta : spec.delta_values) {
    SolverConfig config = spec.run.config;
    config.delta = delta;
    const std::string tag = format_double(delta);
    try {
      config.validate();
      Report r = run_into(l.game, spec.run, config, spec.run.out_dir / ("delta_" + tag));
      summary << tag << ',' << r.iterations() << ',' << format_double(area(r.final_set)) << ','
              << to_string(r.stop_reason) << '\n';
      out << "delta=" << tag << " iterations=" << r.iterations()
          << " final_area=" << format_double(area(r.final_set))
          << " stop_reason=" << to_string(r.stop_reason) << "\n";
      all_ok = all_ok && r.converged;
    } catch (const std::exception& e) {
      summary << tag << ",0,0,error\n";
      err << "delta=" << tag << " error: " << e.what() << "\n";
      all_ok = false;
    }
  }
  try {
    std::filesystem::create_directories(spec.run.out_dir);
    write_text_file(spec.run.out_dir / "summary.csv", summary.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return all_ok ? 0 : 2;
}

}  // namespace ppe::cli
