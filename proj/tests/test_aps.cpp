#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ppe/aps.hpp"
#include "support.hpp"

using namespace ppe;
using test::load_game;

namespace {

const PolygonV kPdW0{{{0, 0}, {8.0 / 3, 0}, {2, 2}, {0, 8.0 / 3}}};

StepOptions step_options(const StageGame& g) {
  StepOptions so;
  so.tol = game_tolerance(g);
  return so;
}

const ICRow& find_row(const ICSystem& s, int player, std::size_t dev) {
  for (const auto& r : s.rows)
    if (r.player == player && r.deviation == dev) return r;
  FAIL("row not found");
  return s.rows.front();
}

}  // namespace

TEST_CASE("IC rows for the prisoners' dilemma") {
  StageGame pd = load_game("pd.json");
  const double d = 0.9;
  ICSystem cc = ic_constraints(pd, {0, 0}, d);
  CHECK(cc.rows.size() == 2);

  // Player 1 at (C,C): d (g1(ybar) - g1(ylow)) / 6 >= (1 - d), i.e. in <= form
  // -g1(ybar) + g1(ylow) <= -6 (1 - d) / d, scaled to a unit normal.
  const ICRow& r = find_row(cc, 0, 1);
  const double s = std::sqrt(2.0);
  CHECK(r.normal[0] == doctest::Approx(-1 / s));
  CHECK(r.normal[1] == doctest::Approx(0.0));
  CHECK(r.normal[2] == doctest::Approx(1 / s));
  CHECK(r.normal[3] == doctest::Approx(0.0));
  CHECK(r.offset == doctest::Approx(-6 * (1 - d) / d / s));

  // Player 2's row mirrors it on the second coordinates.
  const ICRow& r2 = find_row(cc, 1, 1);
  CHECK(r2.normal[1] == doctest::Approx(-1 / s));
  CHECK(r2.normal[3] == doctest::Approx(1 / s));

  // At (D,D) deviating to C costs 1 today, so the >= form has right side
  // (1-d)(-1-0) < 0. Raw <= row: (d/4) g_i(ybar) - (d/4) g_i(ylow) <= (1-d).
  for (const auto& row : ic_constraints(pd, {1, 1}, d).rows) {
    const int i = row.player;
    CHECK(row.normal[i] == doctest::Approx(1 / s));
    CHECK(row.normal[2 + i] == doctest::Approx(-1 / s));
    CHECK(row.offset == doctest::Approx((1 - d) / (d * s / 4)));
  }
}

TEST_CASE("IC rows at delta = 0") {
  StageGame pd = load_game("pd.json");
  for (ActionProfile a : pd.profiles()) {
    for (const auto& r : ic_constraints(pd, a, 0.0).rows) {
      for (double c : r.normal) CHECK(c == 0.0);
      ActionProfile dev = r.player == 0 ? ActionProfile{r.deviation, a.a2}
                                        : ActionProfile{a.a1, r.deviation};
      CHECK(r.offset == doctest::Approx(-(pd.payoff(dev, r.player) - pd.payoff(a, r.player))));
    }
  }
  StageGame single({{{"a"}, {"x", "y"}}}, {"s"}, {{1, 1}, {2, 2}}, {{1.0}, {1.0}});
  ICSystem s = ic_constraints(single, {0, 0}, 0.5);
  CHECK(s.rows.size() == 1);
  CHECK(s.rows[0].player == 1);
}

TEST_CASE("enforceable payoffs at delta = 0") {
  StageGame pd = load_game("pd.json");
  auto so = step_options(pd);
  CHECK(enforceable_payoffs(pd, {1, 1}, 0.0, kPdW0, so).set.vertices ==
        std::vector<Point2>{{0, 0}});
  CHECK(enforceable_payoffs(pd, {0, 0}, 0.0, kPdW0, so).set.empty());
  CHECK(enforceable_payoffs(pd, {0, 1}, 0.0, kPdW0, so).set.empty());
  CHECK(apply_B(pd, 0.0, kPdW0, 0.0, so).set.vertices == std::vector<Point2>{{0, 0}});
}

TEST_CASE("P(C,C) at delta = 0.9 is certified vertex by vertex") {
  StageGame pd = load_game("pd.json");
  auto so = step_options(pd);
  PolygonV p = enforceable_payoffs(pd, {0, 0}, 0.9, kPdW0, so).set;
  REQUIRE(p.full_dimensional());
  CHECK(containment_slack(p, kPdW0) > 0.0);
  for (Point2 v : p.vertices) {
    Certificate c = verify_enforceability(pd, {0, 0}, 0.9, v, kPdW0);
    CHECK(c.ok);
    CHECK(c.max_violation <= 1e-7);
    REQUIRE(c.gamma.size() == 2);
    // Recompute promise keeping from the returned mapping.
    Point2 rebuilt = 0.1 * pd.payoff({0, 0}) + (0.9 * 2 / 3) * c.gamma[0] + (0.9 / 3) * c.gamma[1];
    CHECK(distance(rebuilt, v) <= 1e-7);
    for (Point2 g : c.gamma) CHECK(distance_to(g, kPdW0) <= 1e-7);
  }

  // A point pushed outside P(C,C) has no certificate.
  Point2 centre{0, 0};
  for (Point2 v : p.vertices) centre = centre + (1.0 / p.size()) * v;
  Point2 outside = p.vertices[0] + 0.2 * (p.vertices[0] - centre);
  Certificate bad = verify_enforceability(pd, {0, 0}, 0.9, outside, kPdW0);
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_violation > 1e-7);
  CHECK_FALSE(bad.worst_row.empty());
}

TEST_CASE("static Nash payoff certified by constant continuation") {
  StageGame c = load_game("cournot.json");
  for (double d : {0.0, 0.5, 0.9}) {
    Certificate cert = verify_enforceability(c, {1, 1}, d, {10, 4}, PolygonV{{{10, 4}}});
    CHECK(cert.ok);
    for (Point2 g : cert.gamma) CHECK(distance(g, {10, 4}) <= 1e-7);
  }
}

TEST_CASE("first PD iteration at delta = 0.9") {
  StageGame pd = load_game("pd.json");
  auto so = step_options(pd);
  BResult b = apply_B(pd, 0.9, kPdW0, 0.0, so);
  REQUIRE(b.per_action.size() == 4);
  for (const auto& p : b.per_action) {
    REQUIRE_FALSE(p.empty());
    CHECK(containment_slack(p, b.set) >= -1e-9);
  }
  CHECK(containment_slack(b.set, kPdW0) >= -1e-9);
  CHECK(area(b.set) < area(kPdW0));
  CHECK(distance_to({0, 0}, b.set) == 0.0);
  CHECK(b.set == b.hull);
}

TEST_CASE("B is monotone on random 2x2 games") {
  std::mt19937_64 rng(2024);
  int tested = 0;
  for (int t = 0; t < 60; ++t) {
    StageGame g = test::random_game(rng, 2, 2, 2);
    PolygonV w = individually_rational_set(g).individually_rational;
    if (!w.full_dimensional()) continue;
    // Shrink towards the centroid for a nested inner set.
    Point2 c{0, 0};
    for (Point2 v : w.vertices) c = c + (1.0 / w.size()) * v;
    std::vector<Point2> inner_pts;
    for (Point2 v : w.vertices) inner_pts.push_back(c + 0.7 * (v - c));
    PolygonV inner = convex_hull(inner_pts);
    auto so = step_options(g);
    for (double d : {0.3, 0.7, 0.9}) {
      BResult outer = apply_B(g, d, w, 0.0, so);
      BResult in = apply_B(g, d, inner, 0.0, so);
      if (in.set.empty()) continue;
      REQUIRE_FALSE(outer.set.empty());
      CHECK(containment_slack(in.set, outer.set) >= -1e-7);
      CHECK(containment_slack(outer.set, w) >= -1e-7);
      ++tested;
    }
  }
  CHECK(tested > 20);
}

TEST_CASE("solve: PD collapses for impatient players") {
  StageGame pd = load_game("pd.json");
  SolverConfig cfg;
  cfg.delta = 0.8;
  Report r = solve(pd, cfg);
  CHECK(r.converged);
  CHECK(r.stop_reason == StopReason::hausdorff_epsilon);
  for (Point2 v : r.final_set.vertices) CHECK(norm(v) < 0.05);
  CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations() + 1));
  CHECK(r.trace[0].set == individually_rational_set(pd).individually_rational);
}

TEST_CASE("solve at delta = 0 stops after one step at the Nash hull") {
  StageGame c = load_game("cournot.json");
  SolverConfig cfg;
  cfg.delta = 0.0;
  Report r = solve(c, cfg);
  REQUIRE(r.trace.size() >= 2);
  CHECK(r.trace[1].set.vertices == std::vector<Point2>{{10, 4}});
  CHECK(r.final_set.vertices == std::vector<Point2>{{10, 4}});
}

TEST_CASE("solve with no pure equilibrium ends empty") {
  // Matching pennies: W0 is the single point (0,0) but nothing enforces it.
  StageGame mp({{{"h", "t"}, {"h", "t"}}}, {"y"}, {{1, -1}, {-1, 1}, {-1, 1}, {1, -1}},
               {{1.0}, {1.0}, {1.0}, {1.0}});
  SolverConfig cfg;
  cfg.delta = 0.9;
  Report r = solve(mp, cfg);
  CHECK(r.stop_reason == StopReason::empty_set);
  CHECK(r.final_set.empty());
}

TEST_CASE("solve: max_iter and truncation stops") {
  StageGame pd = load_game("pd.json");
  SolverConfig cfg;
  cfg.delta = 0.9;
  cfg.max_iter = 3;
  Report r = solve(pd, cfg);
  CHECK(r.stop_reason == StopReason::max_iter);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations() == 3);

  cfg.max_iter = 50;
  cfg.vertex_cap = 500;
  Report t = solve(pd, cfg);
  CHECK(t.stop_reason == StopReason::truncated);
  CHECK_FALSE(t.converged);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.theta = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epsilon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("stop reasons round trip through text") {
  for (auto r : {StopReason::area_epsilon, StopReason::hausdorff_epsilon, StopReason::max_iter,
                 StopReason::empty_set, StopReason::truncated})
    CHECK(stop_reason_from_string(to_string(r)) == r);
  CHECK_FALSE(stop_reason_from_string("nope").has_value());
}

TEST_CASE("thread count does not change the result") {
  StageGame c = load_game("cournot.json");
  SolverConfig cfg;
  cfg.delta = 0.8;
  cfg.theta = 0.02;
  cfg.max_iter = 6;
  cfg.threads = 1;
  Report a = solve(c, cfg);
  cfg.threads = 4;
  Report b = solve(c, cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].set == b.trace[k].set);
    CHECK(a.trace[k].area == b.trace[k].area);
  }
}

TEST_CASE("soundness at the stop: one more step barely moves the set") {
  StageGame pd = load_game("pd.json");
  SolverConfig cfg;
  cfg.delta = 0.9;
  cfg.theta = 0.02;
  Report r = solve(pd, cfg);
  REQUIRE(r.converged);
  BResult exact = apply_B(pd, 0.9, r.final_set, 0.0, step_options(pd));
  CHECK(area(r.final_set) - area(exact.set) < cfg.epsilon);
  // The simplified step is clipped to its input, so it can only shrink.
  BResult again = apply_B(pd, 0.9, r.final_set, cfg.theta, step_options(pd));
  CHECK(containment_slack(again.set, r.final_set) >= -1e-7);
}
