#include "ppe/aps.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ppe/lp.hpp"

namespace ppe {
namespace {

constexpr double kZeroNormal = 1e-15;

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::string ic_row_label(const StageGame& game, const ICRow& r) {
  return "IC player " + std::to_string(r.player + 1) + " deviation to " +
         game.action_labels(r.player)[r.deviation];
}

}  // namespace

ICSystem ic_constraints(const StageGame& game, ActionProfile a, double delta) {
  ICSystem sys;
  sys.profile = a;
  const std::size_t ny = game.num_signals();
  const auto& pa = game.signal_probs(a);
  for (int i = 0; i < 2; ++i) {
    const std::size_t own = i == 0 ? a.a1 : a.a2;
    for (std::size_t d = 0; d < game.num_actions(i); ++d) {
      if (d == own) continue;
      ActionProfile dev = i == 0 ? ActionProfile{d, a.a2} : ActionProfile{a.a1, d};
      const auto& pd = game.signal_probs(dev);
      // d sum_y [rho(y|a) - rho(y|dev)] g_i(y) >= (1-d) [u_i(dev) - u_i(a)]
      ICRow row;
      row.player = i;
      row.deviation = d;
      row.normal.assign(2 * ny, 0.0);
      for (std::size_t y = 0; y < ny; ++y) row.normal[2 * y + i] = -delta * (pa[y] - pd[y]);
      row.offset = -(1.0 - delta) * (game.payoff(dev, i) - game.payoff(a, i));
      double len = 0.0;
      for (double c : row.normal) len += c * c;
      len = std::sqrt(len);
      if (len > kZeroNormal) {
        for (double& c : row.normal) c /= len;
        row.offset /= len;
      } else {
        std::fill(row.normal.begin(), row.normal.end(), 0.0);
      }
      sys.rows.push_back(std::move(row));
    }
  }
  return sys;
}

EnforceResult enforceable_payoffs(const StageGame& game, ActionProfile a, double delta,
                                  const PolygonV& w, const StepOptions& opts) {
  EnforceResult out;
  if (w.empty()) return out;
  const ICSystem ic = ic_constraints(game, a, delta);
  const Point2 u = game.payoff(a);
  const Point2 c = (1.0 - delta) * u;

  bool any_active = false;
  for (const auto& r : ic.rows) {
    bool zero = std::all_of(r.normal.begin(), r.normal.end(), [](double v) { return v == 0.0; });
    if (zero && r.offset < -opts.tol.eps_side) return out;
    any_active |= !zero;
  }
  if (delta == 0.0) {
    out.set = PolygonV{{c}};
    return out;
  }

  // Signals that neither a nor any unilateral deviation can produce only
  // carry an unconstrained g(y) in W; they do not affect P(a).
  const std::size_t ny = game.num_signals();
  const auto& pa = game.signal_probs(a);
  std::vector<std::size_t> keep;
  for (std::size_t y = 0; y < ny; ++y) {
    bool used = pa[y] > 0.0;
    for (const auto& r : ic.rows) used = used || r.normal[2 * y] != 0.0 || r.normal[2 * y + 1] != 0.0;
    if (used) keep.push_back(y);
  }

  std::vector<HRow> rows;
  if (any_active) {
    for (const auto& r : ic.rows) {
      HRow h;
      h.normal.assign(2 * keep.size(), 0.0);
      bool zero = true;
      for (std::size_t k = 0; k < keep.size(); ++k) {
        h.normal[2 * k] = r.normal[2 * keep[k]];
        h.normal[2 * k + 1] = r.normal[2 * keep[k] + 1];
        zero = zero && h.normal[2 * k] == 0.0 && h.normal[2 * k + 1] == 0.0;
      }
      if (zero) continue;
      h.offset = r.offset;
      rows.push_back(std::move(h));
    }
  }

  EnumOptions eo;
  eo.eps_side = opts.tol.eps_side;
  eo.eps_point = opts.tol.eps_point;
  eo.vertex_cap = opts.vertex_cap;
  eo.adjacency = opts.adjacency;
  VertexSet vs = enumerate_product_vertices(w, keep.size(), rows, eo);
  out.dd_vertices = vs.size();
  if (vs.truncated) {
    out.truncated = true;
    return out;
  }
  if (vs.size() == 0) return out;

  const std::size_t dim = 2 * keep.size();
  std::vector<double> m(2 * dim, 0.0);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    m[2 * k] = delta * pa[keep[k]];
    m[dim + 2 * k + 1] = delta * pa[keep[k]];
  }
  auto images = affine_image_2d(vs, m, c);
  out.set = convex_hull(images, opts.tol);
  return out;
}

BResult apply_B(const StageGame& game, double delta, const PolygonV& w, double theta,
                const StepOptions& opts) {
  const std::size_t n = game.num_profiles();
  std::vector<EnforceResult> results(n);
  const unsigned nthreads = std::min<unsigned>(resolve_threads(opts.threads), n);

  if (nthreads <= 1) {
    for (std::size_t k = 0; k < n; ++k)
      results[k] = enforceable_payoffs(game, game.profile(k), delta, w, opts);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(nthreads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k; (k = next.fetch_add(1)) < n;)
            results[k] = enforceable_payoffs(game, game.profile(k), delta, w, opts);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Merge in profile order so the outcome does not depend on scheduling.
  BResult out;
  std::vector<Point2> pts;
  for (auto& r : results) {
    out.truncated = out.truncated || r.truncated;
    out.max_dd_vertices = std::max(out.max_dd_vertices, r.dd_vertices);
    pts.insert(pts.end(), r.set.vertices.begin(), r.set.vertices.end());
    out.per_action.push_back(std::move(r.set));
  }
  if (out.truncated) return out;

  // A static Nash payoff inside W is enforced by the constant continuation,
  // so it belongs to B(W) exactly. Adding it verbatim stops tolerance-sized
  // drift from pushing it out of the iterates over many steps.
  std::vector<Point2> anchors;
  for (ActionProfile a : pure_nash(game)) {
    Point2 u = game.payoff(a);
    if (distance_to(u, w) <= opts.tol.eps_point) anchors.push_back(u);
  }
  pts.insert(pts.end(), anchors.begin(), anchors.end());
  out.hull = convex_hull(pts, opts.tol);
  if (theta > 0.0) {
    // The simplified input is an inner approximation, so B of it can reach
    // past it; clipping to W keeps the iterates nested.
    PolygonV clipped = out.hull;
    for (const auto& r : constraint_rows(w)) {
      if (clipped.empty()) break;
      clipped = intersect_halfplane(clipped, r.normal, r.offset, opts.tol);
    }
    out.set = rdp_simplify(clipped, theta);
    // Simplification may shave an anchor off the boundary; put it back.
    std::vector<Point2> anchored = out.set.vertices;
    for (Point2 u : anchors)
      if (distance_to(u, out.set) > opts.tol.eps_point) anchored.push_back(u);
    if (anchored.size() != out.set.size()) out.set = convex_hull(anchored, opts.tol);
  } else {
    out.set = out.hull;
  }
  return out;
}

void SolverConfig::validate() const {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(hausdorff_epsilon > 0.0))
    throw std::invalid_argument("hausdorff_epsilon must be positive");
  if (vertex_cap < 1) throw std::invalid_argument("vertex_cap must be at least 1");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::area_epsilon: return "area_epsilon";
    case StopReason::hausdorff_epsilon: return "hausdorff_epsilon";
    case StopReason::max_iter: return "max_iter";
    case StopReason::empty_set: return "empty_set";
    case StopReason::truncated: return "truncated";
  }
  return "unknown";
}

std::optional<StopReason> stop_reason_from_string(const std::string& s) {
  for (auto r : {StopReason::area_epsilon, StopReason::hausdorff_epsilon, StopReason::max_iter,
                 StopReason::empty_set, StopReason::truncated})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

// Share of the previous area a step may remove and still count as settled
// under the area rule.
constexpr double kCollapseShare = 0.01;

Report solve(const StageGame& game, const SolverConfig& config, const StepObserver& observer) {
  config.validate();
  Report report;
  report.config = config;
  report.tol = game_tolerance(game);

  StepOptions opts;
  opts.tol = report.tol;
  opts.vertex_cap = config.vertex_cap;
  opts.threads = config.threads;

  IterationTrace first;
  first.set = individually_rational_set(game).individually_rational;
  first.area = area(first.set);
  report.trace.push_back(first);
  if (first.set.empty()) {
    report.stop_reason = StopReason::empty_set;
    report.converged = true;
    return report;
  }

  report.stop_reason = StopReason::max_iter;
  for (int k = 1; k <= config.max_iter; ++k) {
    const PolygonV& prev = report.trace.back().set;
    const double prev_area = report.trace.back().area;
    auto t0 = std::chrono::steady_clock::now();
    BResult step = apply_B(game, config.delta, prev, config.theta, opts);
    auto t1 = std::chrono::steady_clock::now();
    if (observer) observer(k, prev, step);
    if (step.truncated) {
      report.stop_reason = StopReason::truncated;
      break;
    }

    IterationTrace it;
    it.iteration = k;
    it.set = step.set;
    it.area = area(it.set);
    it.area_diff = std::abs(prev_area - it.area);
    it.hausdorff_diff = it.set.empty() ? 0.0 : hausdorff(prev, it.set);
    for (const auto& p : step.per_action) it.enforceable.push_back(!p.empty());
    it.dd_vertices = step.max_dd_vertices;
    it.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.trace.push_back(std::move(it));
    const IterationTrace& cur = report.trace.back();

    if (cur.set.empty()) {
      report.stop_reason = StopReason::empty_set;
      break;
    }
    // Once the set has (almost) no area, the area rule cannot tell a
    // shrinking sliver from a settled point. The same holds while a small
    // set is still losing a sizeable share of its area each step.
    const bool collapsing =
        prev_area < config.epsilon || cur.area_diff > kCollapseShare * prev_area;
    if (!collapsing && cur.area_diff < config.epsilon) {
      report.stop_reason = StopReason::area_epsilon;
      break;
    }
    if (cur.hausdorff_diff < config.hausdorff_epsilon) {
      report.stop_reason = StopReason::hausdorff_epsilon;
      break;
    }
  }
  report.converged = report.stop_reason == StopReason::area_epsilon ||
                     report.stop_reason == StopReason::hausdorff_epsilon ||
                     report.stop_reason == StopReason::empty_set;
  report.final_set = report.trace.back().set;
  return report;
}

Certificate verify_enforceability(const StageGame& game, ActionProfile a, double delta,
                                  Point2 v, const PolygonV& w, double tolerance) {
  Certificate cert;
  if (w.empty()) {
    cert.worst_row = "continuation set is empty";
    cert.max_violation = std::numeric_limits<double>::infinity();
    return cert;
  }
  const std::size_t ny = game.num_signals();
  const std::size_t nv = 2 * ny + 1;  // g plus the violation bound s
  const auto wrows = constraint_rows(w);
  const ICSystem ic = ic_constraints(game, a, delta);
  const auto& pa = game.signal_probs(a);
  const Point2 target = v - (1.0 - delta) * game.payoff(a);

  // Every row reads  coeffs . g <= rhs ; the LP relaxes each by s.
  struct Row {
    std::vector<double> coeffs;
    double rhs;
    std::string label;
  };
  std::vector<Row> rows;
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t j = 0; j < wrows.size(); ++j) {
      std::vector<double> r(2 * ny, 0.0);
      r[2 * y] = wrows[j].normal.x;
      r[2 * y + 1] = wrows[j].normal.y;
      rows.push_back({std::move(r), wrows[j].offset,
                      "g(" + game.signal_labels()[y] + ") in W, row " + std::to_string(j)});
    }
  }
  for (const auto& r : ic.rows) rows.push_back({r.normal, r.offset, ic_row_label(game, r)});
  for (int i = 0; i < 2; ++i) {
    std::vector<double> r(2 * ny, 0.0);
    for (std::size_t y = 0; y < ny; ++y) r[2 * y + i] = delta * pa[y];
    double t = i == 0 ? target.x : target.y;
    std::vector<double> neg(r);
    for (double& x : neg) x = -x;
    std::string label = "promise keeping player " + std::to_string(i + 1);
    rows.push_back({std::move(r), t, label});
    rows.push_back({std::move(neg), -t, label});
  }

  lp::Inequalities sys;
  sys.num_vars = nv;
  for (const auto& r : rows) {
    std::vector<double> c = r.coeffs;
    c.push_back(-1.0);
    sys.add(std::move(c), r.rhs);
  }
  std::vector<double> cost(nv, 0.0);
  cost[nv - 1] = 1.0;
  lp::Result res = lp::minimize(cost, sys);
  std::vector<double> g(2 * ny, 0.0);
  if (res.status == lp::Status::optimal) std::copy(res.x.begin(), res.x.end() - 1, g.begin());

  cert.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) lhs += r.coeffs[j] * g[j];
    double viol = lhs - r.rhs;
    if (viol > cert.max_violation) {
      cert.max_violation = viol;
      cert.worst_row = r.label;
    }
  }
  cert.max_violation = std::max(cert.max_violation, 0.0);
  for (std::size_t y = 0; y < ny; ++y) cert.gamma.push_back({g[2 * y], g[2 * y + 1]});
  cert.ok = res.status == lp::Status::optimal && cert.max_violation <= tolerance;
  return cert;
}

}  // namespace ppe
