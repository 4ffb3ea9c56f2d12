#pragma once

// Vertex enumeration for bounded H-polytopes via the double-description
// method, and the product polytope W^Y that houses continuation mappings.
//
// Two entry points share the same contract (vertices of {x : A x <= b}):
//   enumerate_vertices          - textbook DD on the homogenized cone,
//                                 starting from the whole space.
//   enumerate_product_vertices  - DD seeded with the known double
//                                 description of W^Y, then cut by extra rows.
// The second exists because W^Y has |W|^|Y| vertices whose adjacency is
// known in closed form; rediscovering it from scratch dominates run time.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ppe/geometry.hpp"

namespace ppe {

// a.x <= offset over R^dim.
struct HRow {
  std::vector<double> normal;
  double offset = 0.0;
};

struct HPolytope {
  std::size_t dim = 0;
  std::vector<HRow> rows;

  void stack(std::span<const HRow> more) { rows.insert(rows.end(), more.begin(), more.end()); }
};

struct VertexSet {
  std::size_t dim = 0;
  std::vector<double> coords;                     // row-major, dim per vertex
  std::vector<std::vector<std::size_t>> active;   // tight row indices
  bool truncated = false;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }
};

enum class AdjacencyTest {
  combinatorial,  // no third vertex shares the common active set
  algebraic,      // common active rows have rank dim - 1
  automatic,      // combinatorial on small candidate sets, algebraic otherwise
};

struct EnumOptions {
  double eps_side = 1e-9;
  double eps_point = 1e-9;
  std::size_t vertex_cap = 200000;
  AdjacencyTest adjacency = AdjacencyTest::automatic;
};

class UnboundedPolytopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// W^num_signals in R^{2 num_signals}: each row of constraint_rows(w) is
// replicated on coordinates (2y, 2y+1). Rows are grouped by signal.
HPolytope product_polytope(const PolygonV& w, std::size_t num_signals);

VertexSet enumerate_vertices(const HPolytope& p, const EnumOptions& opts = {});

// Vertices of product_polytope(w, num_signals) with extra_rows stacked
// below. Active indices refer to that stacked row order.
VertexSet enumerate_product_vertices(const PolygonV& w, std::size_t num_signals,
                                     std::span<const HRow> extra_rows,
                                     const EnumOptions& opts = {});

// x -> M x + c for every vertex; M is 2 x dim, row-major.
std::vector<Point2> affine_image_2d(const VertexSet& vs, std::span<const double> m,
                                    Point2 c);

}  // namespace ppe
