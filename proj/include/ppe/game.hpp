#pragma once

// Two-player stage game with a public signal, plus the static analysis the
// iteration needs: pure minmax, pure Nash profiles, feasible and
// individually rational payoff sets.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppe/geometry.hpp"

namespace ppe {

struct ActionProfile {
  std::size_t a1 = 0;
  std::size_t a2 = 0;
  friend bool operator==(ActionProfile, ActionProfile) = default;
  friend auto operator<=>(ActionProfile, ActionProfile) = default;
};

class StageGame {
 public:
  StageGame() = default;
  // payoffs and signal_probs are indexed by profile_index(a1, a2).
  StageGame(std::array<std::vector<std::string>, 2> action_labels,
            std::vector<std::string> signal_labels, std::vector<Point2> payoffs,
            std::vector<std::vector<double>> signal_probs);

  std::size_t num_actions(int player) const { return actions_[player].size(); }
  std::size_t num_signals() const { return signals_.size(); }
  std::size_t num_profiles() const { return payoffs_.size(); }

  std::size_t profile_index(ActionProfile a) const {
    return a.a1 * actions_[1].size() + a.a2;
  }
  ActionProfile profile(std::size_t index) const {
    return {index / actions_[1].size(), index % actions_[1].size()};
  }
  std::vector<ActionProfile> profiles() const;

  Point2 payoff(ActionProfile a) const { return payoffs_[profile_index(a)]; }
  // Payoff of player (0 or 1).
  double payoff(ActionProfile a, int player) const {
    Point2 u = payoff(a);
    return player == 0 ? u.x : u.y;
  }
  const std::vector<double>& signal_probs(ActionProfile a) const {
    return probs_[profile_index(a)];
  }

  const std::vector<std::string>& action_labels(int player) const {
    return actions_[player];
  }
  const std::vector<std::string>& signal_labels() const { return signals_; }
  std::string profile_label(ActionProfile a) const;

  // max |u_i(a)| over all profiles and players.
  double payoff_magnitude() const;

 private:
  std::array<std::vector<std::string>, 2> actions_;
  std::vector<std::string> signals_;
  std::vector<Point2> payoffs_;
  std::vector<std::vector<double>> probs_;
};

class GameError : public std::runtime_error {
 public:
  enum class Kind { syntax, schema, probability };
  GameError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ParseOptions {
  // At most 3 actions per player and 4 signals, unless lifted.
  bool enforce_size_caps = true;
};

inline constexpr double kProbabilityTolerance = 1e-12;

StageGame parse_game(std::string_view text, const ParseOptions& opts = {});

// A number written as a decimal or as an exact ratio "p/q".
// Throws GameError (schema) when unreadable.
double parse_number(std::string_view text);
std::string serialize_game(const StageGame& game);

struct MinmaxPair {
  Point2 v_under;
  // punisher[i] is the opponent action that holds player i to v_under.
  std::array<std::size_t, 2> punisher{};
};

MinmaxPair minmax(const StageGame& game);

// All pure profiles where each action is a (weak) best response.
std::vector<ActionProfile> pure_nash(const StageGame& game);

// Tolerances for a game, scaled by its payoff magnitude.
GeomTolerance game_tolerance(const StageGame& game);

PolygonV feasible_set(const StageGame& game);

struct PayoffSetPair {
  PolygonV feasible;
  PolygonV individually_rational;
  bool ir_empty() const { return individually_rational.empty(); }
};

PayoffSetPair individually_rational_set(const StageGame& game);

}  // namespace ppe
