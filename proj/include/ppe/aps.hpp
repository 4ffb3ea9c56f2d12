#pragma once

// Set-valued iteration for perfect public equilibrium payoffs.
//
// For a continuation set W, the payoffs enforceable by a profile a are
//   P(a) = {(1-d) u(a) + d sum_y rho(y|a) g(y) : g(y) in W, g satisfies IC},
// and one step of the operator is B(W) = co U_a P(a). Starting from the
// individually rational feasible set, iterating B yields a decreasing
// sequence whose limit contains every PPE payoff; stopping early gives an
// outer bound.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ppe/game.hpp"
#include "ppe/geometry.hpp"
#include "ppe/vertex_enum.hpp"

namespace ppe {

// One incentive constraint over the continuation vector g in R^{2|Y|},
// laid out as (g_1(y0), g_2(y0), g_1(y1), ...). Normal is unit length,
// or all zeros when deviation and equilibrium signal laws coincide.
struct ICRow {
  int player = 0;            // 0 or 1
  std::size_t deviation = 0; // the deviating action of that player
  std::vector<double> normal;
  double offset = 0.0;
};

struct ICSystem {
  ActionProfile profile;
  std::vector<ICRow> rows;
};

ICSystem ic_constraints(const StageGame& game, ActionProfile a, double delta);

struct StepOptions {
  GeomTolerance tol;
  std::size_t vertex_cap = 200000;
  AdjacencyTest adjacency = AdjacencyTest::automatic;
  unsigned threads = 1;
};

struct EnforceResult {
  PolygonV set;             // P(a), possibly empty
  bool truncated = false;
  std::size_t dd_vertices = 0;  // vertices of the continuation polytope
};

EnforceResult enforceable_payoffs(const StageGame& game, ActionProfile a, double delta,
                                  const PolygonV& w, const StepOptions& opts);

struct BResult {
  PolygonV set;                    // B(W), clipped to W and simplified when theta > 0
  PolygonV hull;                   // B(W) before simplification
  std::vector<PolygonV> per_action;  // indexed by profile index
  bool truncated = false;
  std::size_t max_dd_vertices = 0;
};

BResult apply_B(const StageGame& game, double delta, const PolygonV& w, double theta,
                const StepOptions& opts);

struct SolverConfig {
  double delta = 0.9;
  double epsilon = 0.005;
  double theta = 0.0;
  int max_iter = 200;
  double hausdorff_epsilon = 1e-6;
  std::size_t vertex_cap = 200000;
  unsigned threads = 0;  // 0: hardware default

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class StopReason { area_epsilon, hausdorff_epsilon, max_iter, empty_set, truncated };

std::string to_string(StopReason r);
std::optional<StopReason> stop_reason_from_string(const std::string& s);

struct IterationTrace {
  int iteration = 0;
  PolygonV set;
  double area = 0.0;
  double area_diff = 0.0;       // |area(W^{k-1}) - area(W^k)|, 0 for k = 0
  double hausdorff_diff = 0.0;  // hausdorff(W^{k-1}, W^k), 0 for k = 0
  std::vector<bool> enforceable;  // per profile index; empty for k = 0
  std::size_t dd_vertices = 0;  // largest continuation polytope this step
  double wall_ms = 0.0;
};

struct Report {
  SolverConfig config;
  GeomTolerance tol;
  std::vector<IterationTrace> trace;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iter;
  PolygonV final_set;

  const PolygonV& initial_set() const { return trace.front().set; }
  int iterations() const { return static_cast<int>(trace.size()) - 1; }
};

// Called after every step with the input set and the step result.
using StepObserver = std::function<void(int iteration, const PolygonV& input, const BResult&)>;

Report solve(const StageGame& game, const SolverConfig& config,
             const StepObserver& observer = {});

struct Certificate {
  bool ok = false;
  std::vector<Point2> gamma;   // one continuation payoff per signal
  double max_violation = 0.0;  // over promise keeping, IC and g(y) in W
  std::string worst_row;       // description of the most violated row
};

// Independent check that v is enforced by a against w: searches for a
// continuation mapping by linear programming.
Certificate verify_enforceability(const StageGame& game, ActionProfile a, double delta,
                                  Point2 v, const PolygonV& w, double tolerance = 1e-7);

}  // namespace ppe
