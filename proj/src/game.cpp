#include "ppe/game.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace ppe {
namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxActions = 3;
constexpr std::size_t kMaxSignals = 4;

[[noreturn]] void schema_error(const std::string& msg) {
  throw GameError(GameError::Kind::schema, msg);
}

double parse_decimal(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto first = s.data();
  auto last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    schema_error(where + ": cannot read number \"" + std::string(s) + "\"");
  return v;
}

// Accepts JSON numbers, decimal strings and exact ratios "p/q".
double read_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) schema_error(where + ": expected a number");
  std::string s = j.get<std::string>();
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto slash = s.find('/');
  if (slash == std::string::npos) return parse_decimal(s, where);
  double num = parse_decimal(std::string_view(s).substr(0, slash), where);
  double den = parse_decimal(std::string_view(s).substr(slash + 1), where);
  if (den == 0.0) schema_error(where + ": zero denominator in \"" + s + "\"");
  return num / den;
}

std::vector<std::string> read_labels(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) schema_error(what + " must be a nonempty array");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : j) {
    if (!e.is_string()) schema_error(what + " must contain strings");
    auto s = e.get<std::string>();
    if (!seen.insert(s).second) schema_error(what + ": duplicate label \"" + s + "\"");
    out.push_back(std::move(s));
  }
  return out;
}

const json& field(const json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end()) schema_error(std::string("missing field \"") + key + "\"");
  return *it;
}

const json& grid_cell(const json& grid, std::size_t i, std::size_t j,
                      std::size_t rows, std::size_t cols, const std::string& what) {
  if (!grid.is_array() || grid.size() != rows)
    schema_error(what + " must have one row per action of player 1");
  const auto& row = grid[i];
  if (!row.is_array() || row.size() != cols)
    schema_error(what + " row " + std::to_string(i) +
                 " must have one entry per action of player 2");
  return row[j];
}

}  // namespace

StageGame::StageGame(std::array<std::vector<std::string>, 2> action_labels,
                     std::vector<std::string> signal_labels,
                     std::vector<Point2> payoffs,
                     std::vector<std::vector<double>> signal_probs)
    : actions_(std::move(action_labels)),
      signals_(std::move(signal_labels)),
      payoffs_(std::move(payoffs)),
      probs_(std::move(signal_probs)) {
  if (actions_[0].empty() || actions_[1].empty())
    schema_error("each player needs at least one action");
  if (signals_.empty()) schema_error("at least one signal is required");
  const std::size_t n = actions_[0].size() * actions_[1].size();
  if (payoffs_.size() != n || probs_.size() != n)
    schema_error("payoffs and signal probabilities must cover every profile");
  for (std::size_t k = 0; k < n; ++k) {
    std::string label = profile_label(profile(k));
    if (probs_[k].size() != signals_.size())
      schema_error("signal probabilities for profile " + label + " have " +
                   std::to_string(probs_[k].size()) + " entries, expected " +
                   std::to_string(signals_.size()));
    double sum = 0.0;
    for (std::size_t y = 0; y < signals_.size(); ++y) {
      double p = probs_[k][y];
      if (!(p >= 0.0))
        throw GameError(GameError::Kind::probability,
                        "negative probability for signal " + signals_[y] +
                            " under profile " + label);
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance)
      throw GameError(GameError::Kind::probability,
                      "signal probabilities for profile " + label + " sum to " +
                          std::to_string(sum) + ", expected 1");
    for (double& p : probs_[k]) p /= sum;
  }
}

std::vector<ActionProfile> StageGame::profiles() const {
  std::vector<ActionProfile> out;
  for (std::size_t k = 0; k < num_profiles(); ++k) out.push_back(profile(k));
  return out;
}

std::string StageGame::profile_label(ActionProfile a) const {
  return "(" + actions_[0][a.a1] + "," + actions_[1][a.a2] + ")";
}

double StageGame::payoff_magnitude() const {
  double m = 0.0;
  for (Point2 u : payoffs_) m = std::max({m, std::abs(u.x), std::abs(u.y)});
  return m;
}

double parse_number(std::string_view text) {
  return read_number(json(std::string(text)), "number");
}

StageGame parse_game(std::string_view text, const ParseOptions& opts) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GameError(GameError::Kind::syntax, std::string("malformed game file: ") + e.what());
  }
  if (!root.is_object()) schema_error("game file must be a JSON object");

  const auto& actions = field(root, "actions");
  if (!actions.is_array() || actions.size() != 2)
    schema_error("\"actions\" must list the action labels of exactly two players");
  std::array<std::vector<std::string>, 2> labels{
      read_labels(actions[0], "actions of player 1"),
      read_labels(actions[1], "actions of player 2")};
  auto signals = read_labels(field(root, "signals"), "\"signals\"");

  if (opts.enforce_size_caps) {
    for (int i = 0; i < 2; ++i)
      if (labels[i].size() > kMaxActions)
        schema_error("player " + std::to_string(i + 1) + " has " +
                     std::to_string(labels[i].size()) +
                     " actions; at most 3 are supported without the size override");
    if (signals.size() > kMaxSignals)
      schema_error("game has " + std::to_string(signals.size()) +
                   " signals; at most 4 are supported without the size override");
  }

  const std::size_t rows = labels[0].size();
  const std::size_t cols = labels[1].size();
  const auto& payoff_grid = field(root, "payoffs");
  const auto& prob_grid = field(root, "signal_probs");

  std::vector<Point2> payoffs;
  std::vector<std::vector<double>> probs;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::string label = "(" + labels[0][i] + "," + labels[1][j] + ")";
      const auto& u = grid_cell(payoff_grid, i, j, rows, cols, "\"payoffs\"");
      if (!u.is_array() || u.size() != 2)
        schema_error("payoff for profile " + label + " must be a pair [u1, u2]");
      payoffs.push_back({read_number(u[0], "payoff " + label),
                         read_number(u[1], "payoff " + label)});

      const auto& row = grid_cell(prob_grid, i, j, rows, cols, "\"signal_probs\"");
      if (!row.is_array() || row.size() != signals.size())
        schema_error("signal probabilities for profile " + label + " must have " +
                     std::to_string(signals.size()) + " entries");
      std::vector<double> p;
      for (std::size_t y = 0; y < signals.size(); ++y)
        p.push_back(read_number(row[y], "signal probability " + label));
      probs.push_back(std::move(p));
    }
  }
  return StageGame(std::move(labels), std::move(signals), std::move(payoffs),
                   std::move(probs));
}

std::string serialize_game(const StageGame& game) {
  json root;
  root["actions"] = json::array({json(game.action_labels(0)), json(game.action_labels(1))});
  root["signals"] = game.signal_labels();
  json payoffs = json::array();
  json probs = json::array();
  for (std::size_t i = 0; i < game.num_actions(0); ++i) {
    json prow = json::array();
    json qrow = json::array();
    for (std::size_t j = 0; j < game.num_actions(1); ++j) {
      Point2 u = game.payoff({i, j});
      prow.push_back({u.x, u.y});
      qrow.push_back(game.signal_probs({i, j}));
    }
    payoffs.push_back(prow);
    probs.push_back(qrow);
  }
  root["payoffs"] = payoffs;
  root["signal_probs"] = probs;
  return root.dump(2) + "\n";
}

MinmaxPair minmax(const StageGame& game) {
  MinmaxPair out;
  double v[2];
  for (int i = 0; i < 2; ++i) {
    const int opp = 1 - i;
    double best = 0.0;
    for (std::size_t b = 0; b < game.num_actions(opp); ++b) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < game.num_actions(i); ++a) {
        ActionProfile p = i == 0 ? ActionProfile{a, b} : ActionProfile{b, a};
        mx = std::max(mx, game.payoff(p, i));
      }
      if (b == 0 || mx < best) {
        best = mx;
        out.punisher[i] = b;
      }
    }
    v[i] = best;
  }
  out.v_under = {v[0], v[1]};
  return out;
}

std::vector<ActionProfile> pure_nash(const StageGame& game) {
  std::vector<ActionProfile> out;
  for (ActionProfile a : game.profiles()) {
    bool stable = true;
    for (std::size_t d = 0; d < game.num_actions(0) && stable; ++d)
      stable = game.payoff({d, a.a2}, 0) <= game.payoff(a, 0);
    for (std::size_t d = 0; d < game.num_actions(1) && stable; ++d)
      stable = game.payoff({a.a1, d}, 1) <= game.payoff(a, 1);
    if (stable) out.push_back(a);
  }
  return out;
}

GeomTolerance game_tolerance(const StageGame& game) {
  return GeomTolerance{}.scaled(game.payoff_magnitude());
}

PolygonV feasible_set(const StageGame& game) {
  std::vector<Point2> pts;
  for (ActionProfile a : game.profiles()) pts.push_back(game.payoff(a));
  return convex_hull(pts, game_tolerance(game));
}

PayoffSetPair individually_rational_set(const StageGame& game) {
  const auto tol = game_tolerance(game);
  PayoffSetPair out;
  out.feasible = feasible_set(game);
  Point2 v = minmax(game).v_under;
  PolygonV w = intersect_halfplane(out.feasible, {-1, 0}, -v.x, tol);
  out.individually_rational = intersect_halfplane(w, {0, -1}, -v.y, tol);
  return out;
}

}  // namespace ppe
