#include "ppe/geometry.hpp"

#include <algorithm>
#include <limits>

#include "ppe/lp.hpp"

namespace ppe {
namespace {

// Distance from x to the closed segment [a, b].
double segment_distance(Point2 x, Point2 a, Point2 b) {
  Point2 d = b - a;
  double len2 = dot(d, d);
  if (len2 == 0.0) return distance(x, a);
  double t = std::clamp(dot(x - a, d) / len2, 0.0, 1.0);
  return distance(x, a + t * d);
}

HalfPlane unit_row(Point2 n, double b) {
  double len = norm(n);
  return {{n.x / len, n.y / len}, b / len};
}

bool feasible_lp(const std::vector<HalfPlane>& rows) {
  lp::Inequalities sys;
  sys.num_vars = 2;
  for (const auto& r : rows) sys.add({r.normal.x, r.normal.y}, r.offset);
  const double zero[2] = {0.0, 0.0};
  return lp::minimize(zero, sys).status != lp::Status::infeasible;
}

}  // namespace

PolygonV convex_hull(std::span<const Point2> points, const GeomTolerance& tol) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 1) return {pts};

  // Exact-sign monotone chain first. Popping near-collinear points here would
  // be unsafe: points with almost equal x are not ordered along the line
  // they nearly share, so an extreme point could be dropped.
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Point2& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);  // last point repeats the first

  // On the convex cycle, drop vertices that coincide with a neighbour or lie
  // within eps_side of the segment joining their neighbours.
  bool changed = true;
  while (changed && hull.size() >= 2) {
    changed = false;
    for (std::size_t i = 0; i < hull.size() && hull.size() >= 2; ++i) {
      const std::size_t n = hull.size();
      Point2 prev = hull[(i + n - 1) % n], cur = hull[i], next = hull[(i + 1) % n];
      bool drop = distance(cur, next) <= tol.eps_point;
      if (!drop && n >= 3) {
        // Distance to the chord segment, not its line: in a sliver a vertex
        // can be near the line yet far beyond the chord's ends.
        Point2 d = next - prev;
        double t = std::clamp(dot(cur - prev, d) / dot(d, d), 0.0, 1.0);
        drop = distance(cur, prev + t * d) <= tol.eps_side;
      }
      if (drop) {
        hull.erase(hull.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return {hull};
}

PolygonH to_halfspaces(const PolygonV& p) {
  if (!p.full_dimensional())
    throw DegenerateInputError("to_halfspaces: polygon has fewer than 3 vertices");
  PolygonH h;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point2 a = v[i];
    Point2 b = v[(i + 1) % v.size()];
    Point2 d = b - a;
    h.rows.push_back(unit_row({d.y, -d.x}, d.y * a.x - d.x * a.y));
  }
  return h;
}

std::vector<HalfPlane> constraint_rows(const PolygonV& p) {
  if (p.empty()) throw EmptyInputError("constraint_rows: empty polygon");
  if (p.full_dimensional()) return to_halfspaces(p).rows;
  const Point2 a = p.vertices[0];
  if (p.size() == 1) {
    return {{{1, 0}, a.x}, {{-1, 0}, -a.x}, {{0, 1}, a.y}, {{0, -1}, -a.y}};
  }
  const Point2 b = p.vertices[1];
  Point2 d = (1.0 / distance(a, b)) * (b - a);
  Point2 n{d.y, -d.x};
  return {{n, dot(n, a)},
          {-1.0 * n, -dot(n, a)},
          {d, dot(d, b)},
          {-1.0 * d, -dot(d, a)}};
}

PolygonV to_vertices(const PolygonH& h, const GeomTolerance& tol) {
  std::vector<HalfPlane> rows;
  for (const auto& r : h.rows) {
    if (norm(r.normal) == 0.0) {
      if (r.offset < -tol.eps_side) return {};
      continue;
    }
    rows.push_back(unit_row(r.normal, r.offset));
  }

  // Nonzero recession cone <=> some edge direction of the cone {d : n.d <= 0}
  // survives; those directions are perpendicular to a row normal.
  bool recedes = rows.empty();
  for (const auto& r : rows) {
    for (double s : {1.0, -1.0}) {
      Point2 d{-s * r.normal.y, s * r.normal.x};
      bool ok = std::all_of(rows.begin(), rows.end(), [&](const HalfPlane& q) {
        return dot(q.normal, d) <= 1e-12;
      });
      recedes = recedes || ok;
    }
  }
  if (recedes) {
    if (!feasible_lp(rows)) return {};
    throw UnboundedError("to_vertices: halfplane system is unbounded");
  }

  std::vector<Point2> candidates;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const auto& a = rows[i];
      const auto& b = rows[j];
      double det = cross(a.normal, b.normal);
      if (std::abs(det) < 1e-12) continue;
      Point2 x{(a.offset * b.normal.y - b.offset * a.normal.y) / det,
               (a.normal.x * b.offset - b.normal.x * a.offset) / det};
      bool inside = std::all_of(rows.begin(), rows.end(), [&](const HalfPlane& q) {
        return dot(q.normal, x) - q.offset <= tol.eps_side;
      });
      if (inside) candidates.push_back(x);
    }
  }
  return convex_hull(candidates, tol);
}

PolygonV intersect_halfplane(const PolygonV& p, Point2 n, double b,
                             const GeomTolerance& tol) {
  double len = norm(n);
  if (len == 0.0) return b >= -tol.eps_side ? p : PolygonV{};
  HalfPlane row = unit_row(n, b);
  auto side = [&](Point2 x) { return dot(row.normal, x) - row.offset; };

  const auto& v = p.vertices;
  std::vector<Point2> out;
  if (v.size() == 1) {
    if (side(v[0]) <= tol.eps_side) out.push_back(v[0]);
    return {out};
  }
  const std::size_t count = v.size() == 2 ? 1 : v.size();
  for (std::size_t i = 0; i < count; ++i) {
    Point2 cur = v[i];
    Point2 next = v[(i + 1) % v.size()];
    double sc = side(cur);
    double sn = side(next);
    if (sc <= tol.eps_side) out.push_back(cur);
    if ((sc < -tol.eps_side && sn > tol.eps_side) ||
        (sc > tol.eps_side && sn < -tol.eps_side)) {
      double t = sc / (sc - sn);
      out.push_back(cur + t * (next - cur));
    }
  }
  if (v.size() == 2 && side(v[1]) <= tol.eps_side) out.push_back(v[1]);
  return convex_hull(out, tol);
}

double area(const PolygonV& p) {
  const auto& v = p.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    twice += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * twice;
}

double distance_to(Point2 x, const PolygonV& p) {
  const auto& v = p.vertices;
  if (v.empty()) throw EmptyInputError("distance_to: empty polygon");
  if (v.size() == 1) return distance(x, v[0]);
  if (v.size() == 2) return segment_distance(x, v[0], v[1]);
  bool inside = true;
  for (std::size_t i = 0; i < v.size() && inside; ++i)
    inside = cross(v[(i + 1) % v.size()] - v[i], x - v[i]) >= 0.0;
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    best = std::min(best, segment_distance(x, v[i], v[(i + 1) % v.size()]));
  return best;
}

double hausdorff(const PolygonV& p, const PolygonV& q) {
  if (p.empty() || q.empty()) throw EmptyInputError("hausdorff: empty polygon");
  double d = 0.0;
  for (Point2 x : p.vertices) d = std::max(d, distance_to(x, q));
  for (Point2 x : q.vertices) d = std::max(d, distance_to(x, p));
  return d;
}

double containment_slack(const PolygonV& inner, const PolygonV& outer) {
  if (outer.empty())
    return inner.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  double slack = std::numeric_limits<double>::infinity();
  if (outer.full_dimensional()) {
    PolygonH h = to_halfspaces(outer);
    for (Point2 x : inner.vertices)
      for (const auto& r : h.rows)
        slack = std::min(slack, r.offset - dot(r.normal, x));
  } else {
    for (Point2 x : inner.vertices) slack = std::min(slack, -distance_to(x, outer));
  }
  return inner.empty() ? 0.0 : slack;
}

PolygonV rdp_simplify(const PolygonV& p, double theta) {
  const auto& v = p.vertices;
  if (theta <= 0.0 || v.size() <= 3) return p;

  std::size_t top = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (lex_less(v[top], v[i])) top = i;

  std::vector<bool> keep(v.size(), false);
  keep[0] = keep[top] = true;

  // Chains are index ranges on the cycle, [first, last] inclusive, where
  // last may wrap back to 0.
  auto simplify_chain = [&](std::size_t first, std::size_t last) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
    while (!stack.empty()) {
      auto [lo, hi] = stack.back();
      stack.pop_back();
      std::size_t hi_idx = hi % v.size();
      double worst = -1.0;
      std::size_t split = lo;
      for (std::size_t i = lo + 1; i < hi; ++i) {
        double d = segment_distance(v[i], v[lo], v[hi_idx]);
        if (d > worst) {
          worst = d;
          split = i;
        }
      }
      if (worst > theta) {
        keep[split] = true;
        stack.push_back({split, hi});
        stack.push_back({lo, split});
      }
    }
  };
  simplify_chain(0, top);
  simplify_chain(top, v.size());

  PolygonV out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (keep[i]) out.vertices.push_back(v[i]);
  return out;
}

}  // namespace ppe
