// ppe: outer bounds on perfect public equilibrium payoff sets.
//
//   ppe solve --game games/pd.json --delta 0.9 --theta 0.02 --out run/
//   ppe sweep --game games/pd.json --delta-grid 0.5,0.8,0.9 --out sweep/

#include <iostream>

#include <CLI11.hpp>

#include "ppe/cli.hpp"
#include "ppe/game.hpp"

namespace {

double read_number_option(const std::string& text, const char* name) {
  try {
    return ppe::parse_number(text);
  } catch (const ppe::GameError&) {
    throw CLI::ValidationError(name, "not a number: " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outer bounds on perfect public equilibrium payoffs of repeated games"};
  app.require_subcommand(1);

  ppe::cli::RunSpec spec;
  std::string delta = "0.9", epsilon = "0.005", theta = "0", emit = "report_json";
  std::string grid;
  int max_iter = spec.config.max_iter;
  double hausdorff_eps = spec.config.hausdorff_epsilon;
  std::size_t vertex_cap = spec.config.vertex_cap;
  std::string game, out_dir = ".";
  bool timing = false, no_caps = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--game", game, "game file (JSON)")->required();
    sub->add_option("--epsilon", epsilon, "area-difference stopping threshold")
        ->capture_default_str();
    sub->add_option("--theta", theta, "RDP simplification threshold (0 = off)")
        ->capture_default_str();
    sub->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    sub->add_option("--hausdorff-epsilon", hausdorff_eps,
                    "stopping threshold once the set has no area")
        ->capture_default_str();
    sub->add_option("--vertex-cap", vertex_cap, "vertex enumeration cap")->capture_default_str();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--emit", emit, "comma list of report_json, trace_csv, svg")
        ->capture_default_str();
    sub->add_flag("--timing", timing, "record wall-clock times in artifacts");
    sub->add_flag("--no-size-caps", no_caps, "accept more than 3 actions or 4 signals");
  };

  CLI::App* solve = app.add_subcommand("solve", "iterate to convergence for one discount factor");
  add_common(solve);
  solve->add_option("--delta", delta, "discount factor in [0,1), decimal or p/q")
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "solve for each discount factor in a grid");
  add_common(sweep);
  sweep->add_option("--delta-grid", grid, "ascending comma list of discount factors")
      ->required();

  try {
    app.parse(argc, argv);
    spec.game_path = game;
    spec.out_dir = out_dir;
    spec.include_timing = timing;
    spec.enforce_size_caps = !no_caps;
    spec.config.epsilon = read_number_option(epsilon, "--epsilon");
    spec.config.theta = read_number_option(theta, "--theta");
    spec.config.max_iter = max_iter;
    spec.config.hausdorff_epsilon = hausdorff_eps;
    spec.config.vertex_cap = vertex_cap;
    spec.config.threads = ppe::cli::threads_from_env();
    spec.outputs = ppe::cli::parse_outputs(emit);
    if (solve->parsed()) spec.config.delta = read_number_option(delta, "--delta");
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (solve->parsed()) return ppe::cli::cmd_solve(spec, std::cout, std::cerr);

  ppe::cli::SweepSpec sweep_spec{spec, {}};
  try {
    sweep_spec.delta_values = ppe::cli::parse_delta_grid(grid);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return ppe::cli::cmd_sweep(sweep_spec, std::cout, std::cerr);
}
