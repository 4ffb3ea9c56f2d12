#pragma once

// Tolerance-aware algebra on convex sets in the payoff plane.
//
// A PolygonV is kept in canonical form: counter-clockwise, starting at the
// lexicographically smallest vertex, without duplicate or collinear
// vertices. Zero vertices encode the empty set, one a point, two a segment.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppe {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Strict lexicographic order, x first.
inline bool lex_less(Point2 a, Point2 b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct GeomTolerance {
  double eps_point = 1e-9;  // points closer than this coincide
  double eps_side = 1e-9;   // signed distance treated as "on the line"

  GeomTolerance scaled(double magnitude) const {
    double s = std::max(1.0, magnitude);
    return {eps_point * s, eps_side * s};
  }
};

struct PolygonV {
  std::vector<Point2> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
  bool full_dimensional() const { return vertices.size() >= 3; }
  friend bool operator==(const PolygonV&, const PolygonV&) = default;
};

// n.x <= offset, with |n| = 1.
struct HalfPlane {
  Point2 normal;
  double offset = 0.0;
};

struct PolygonH {
  std::vector<HalfPlane> rows;
};

class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnboundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Canonical convex hull of an arbitrary finite point set.
PolygonV convex_hull(std::span<const Point2> points,
                     const GeomTolerance& tol = {});

// One outward unit-normal row per edge. Throws DegenerateInputError for
// points and segments; see constraint_rows() for those.
PolygonH to_halfspaces(const PolygonV& p);

// Halfspace form for any nonempty polygon. Points and segments come back as
// equality pairs (n.x <= b and -n.x <= -b) plus end caps for segments.
std::vector<HalfPlane> constraint_rows(const PolygonV& p);

// Vertices of a bounded intersection of halfplanes. Empty, point and
// segment results are legal. Throws UnboundedError when the feasible set is
// nonempty and has a recession direction.
PolygonV to_vertices(const PolygonH& h, const GeomTolerance& tol = {});

// Clip by n.x <= b. n need not be normalized.
PolygonV intersect_halfplane(const PolygonV& p, Point2 n, double b,
                             const GeomTolerance& tol = {});

double area(const PolygonV& p);

// Euclidean distance from x to the convex set p (0 inside).
double distance_to(Point2 x, const PolygonV& p);

// Symmetric Hausdorff distance. Throws EmptyInputError on empty input.
double hausdorff(const PolygonV& p, const PolygonV& q);

// Smallest signed slack of inner's vertices against outer: nonnegative iff
// inner is contained in outer. For lower-dimensional outer sets the slack
// is minus the distance.
double containment_slack(const PolygonV& inner, const PolygonV& outer);

// Ramer-Douglas-Peucker on the closed boundary. The cycle is split at the
// lexicographic minimum and maximum vertices, both kept; each chain is
// reduced independently. theta == 0 returns p unchanged.
PolygonV rdp_simplify(const PolygonV& p, double theta);

}  // namespace ppe
