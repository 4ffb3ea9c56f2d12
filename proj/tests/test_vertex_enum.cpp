#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ppe/vertex_enum.hpp"
#include "support.hpp"

using namespace ppe;
using test::brute_force_vertices;
using test::same_vertex_set;
using test::vertex_list;

namespace {

HPolytope box(std::size_t dim, double lo, double hi) {
  HPolytope p;
  p.dim = dim;
  for (std::size_t j = 0; j < dim; ++j) {
    HRow up, down;
    up.normal.assign(dim, 0.0);
    down.normal.assign(dim, 0.0);
    up.normal[j] = 1;
    up.offset = hi;
    down.normal[j] = -1;
    down.offset = -lo;
    p.rows.push_back(up);
    p.rows.push_back(down);
  }
  return p;
}

void check_vertex_invariants(const HPolytope& p, const VertexSet& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto x = vs.point(i);
    for (const auto& r : p.rows) {
      double lhs = 0;
      for (std::size_t j = 0; j < p.dim; ++j) lhs += r.normal[j] * x[j];
      CHECK(lhs <= r.offset + 1e-9);
    }
    // Enough independent tight rows to pin the point.
    Eigen::MatrixXd a(vs.active[i].size(), p.dim);
    for (std::size_t k = 0; k < vs.active[i].size(); ++k)
      for (std::size_t j = 0; j < p.dim; ++j) a(k, j) = p.rows[vs.active[i][k]].normal[j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    CHECK(lu.rank() == static_cast<Eigen::Index>(p.dim));
  }
}

const PolygonV kPdW0{{{0, 0}, {8.0 / 3, 0}, {2, 2}, {0, 8.0 / 3}}};

}  // namespace

TEST_CASE("4-cube and simplex") {
  auto cube = box(4, 0, 1);
  VertexSet vs = enumerate_vertices(cube);
  CHECK(vs.size() == 16);
  check_vertex_invariants(cube, vs);

  HPolytope simplex = box(4, 0, 10);
  simplex.rows.erase(std::remove_if(simplex.rows.begin(), simplex.rows.end(),
                                    [](const HRow& r) { return r.offset == 10; }),
                     simplex.rows.end());
  simplex.rows.push_back({{1, 1, 1, 1}, 1});
  VertexSet sv = enumerate_vertices(simplex);
  CHECK(sv.size() == 5);
  check_vertex_invariants(simplex, sv);
  CHECK(same_vertex_set(vertex_list(sv), brute_force_vertices(simplex, 1e-9), 1e-9));
}

TEST_CASE("output is lexicographically ordered") {
  VertexSet vs = enumerate_vertices(box(3, -1, 2));
  auto pts = vertex_list(vs);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
}

TEST_CASE("empty and unbounded systems") {
  HPolytope empty = box(2, 0, 1);
  empty.rows.push_back({{1, 1}, -1});
  CHECK(enumerate_vertices(empty).size() == 0);

  HPolytope half;
  half.dim = 2;
  half.rows.push_back({{1, 0}, 1});
  half.rows.push_back({{-1, 0}, 0});
  CHECK_THROWS_AS(enumerate_vertices(half), UnboundedPolytopeError);
}

TEST_CASE("random systems in R3 match the subset oracle") {
  std::mt19937_64 rng(1234);
  int checked = 0;
  for (int t = 0; t < 300 && checked < 100; ++t) {
    HPolytope p = test::random_hpolytope(rng, 3, 4 + t % 7);
    if (!test::is_bounded(p)) {
      CHECK_THROWS_AS(enumerate_vertices(p), UnboundedPolytopeError);
      continue;
    }
    ++checked;
    VertexSet vs = enumerate_vertices(p);
    check_vertex_invariants(p, vs);
    CHECK(same_vertex_set(vertex_list(vs), brute_force_vertices(p, 1e-7), 1e-7));
  }
  CHECK(checked >= 50);
}

TEST_CASE("degenerate vertices: pyramid apex and duplicated rows") {
  // Square pyramid in R3: four side rows share the apex.
  HPolytope pyr;
  pyr.dim = 3;
  pyr.rows = {{{1, 0, 1}, 1}, {{-1, 0, 1}, 1}, {{0, 1, 1}, 1}, {{0, -1, 1}, 1}, {{0, 0, -1}, 0}};
  VertexSet vs = enumerate_vertices(pyr);
  CHECK(vs.size() == 5);
  CHECK(same_vertex_set(vertex_list(vs), brute_force_vertices(pyr, 1e-9), 1e-9));

  HPolytope dup = box(3, 0, 1);
  dup.rows.push_back(dup.rows[0]);
  dup.rows.push_back({{1, 1, 1}, 1});  // cuts through three cube vertices
  VertexSet dv = enumerate_vertices(dup);
  CHECK(same_vertex_set(vertex_list(dv), brute_force_vertices(dup, 1e-9), 1e-9));
}

TEST_CASE("row order does not change the vertex set") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 30; ++t) {
    HPolytope p = test::random_hpolytope(rng, 4, 10);
    if (!test::is_bounded(p)) continue;
    VertexSet a = enumerate_vertices(p);
    std::shuffle(p.rows.begin(), p.rows.end(), rng);
    VertexSet b = enumerate_vertices(p);
    CHECK(same_vertex_set(vertex_list(a), vertex_list(b), 1e-9));
  }
}

TEST_CASE("adjacency tests agree") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    HPolytope p = test::random_hpolytope(rng, 4, 11);
    if (!test::is_bounded(p)) continue;
    EnumOptions comb, alg;
    comb.adjacency = AdjacencyTest::combinatorial;
    alg.adjacency = AdjacencyTest::algebraic;
    CHECK(same_vertex_set(vertex_list(enumerate_vertices(p, comb)),
                          vertex_list(enumerate_vertices(p, alg)), 1e-9));
  }
}

TEST_CASE("product polytope") {
  PolygonV square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  HPolytope p = product_polytope(square, 2);
  CHECK(p.dim == 4);
  CHECK(p.rows.size() == 8);
  CHECK(enumerate_vertices(p).size() == 16);

  HPolytope pd = product_polytope(kPdW0, 2);
  CHECK(pd.rows.size() == 8);
  for (std::size_t k = 0; k < 4; ++k) {  // first block acts on (x0, x1) only
    CHECK(pd.rows[k].normal[2] == 0.0);
    CHECK(pd.rows[k].normal[3] == 0.0);
  }

  HPolytope pin = product_polytope(PolygonV{{{0, 0}}}, 2);
  VertexSet pv = enumerate_vertices(pin);
  REQUIRE(pv.size() == 1);
  for (double x : pv.point(0)) CHECK(x == doctest::Approx(0.0));

  for (std::size_t ny : {1u, 2u, 3u}) {
    CHECK(enumerate_vertices(product_polytope(kPdW0, ny)).size() ==
          static_cast<std::size_t>(std::pow(4, ny)));
    CHECK(enumerate_product_vertices(kPdW0, ny, {}).size() ==
          static_cast<std::size_t>(std::pow(4, ny)));
  }
}

TEST_CASE("seeded product enumeration matches the generic route") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    std::vector<Point2> pts;
    for (int k = 0; k < 3 + t % 5; ++k) pts.push_back({u(rng), u(rng)});
    PolygonV w = convex_hull(pts);
    const std::size_t ny = 1 + t % 3;
    std::vector<HRow> extra;
    for (int k = 0; k < 1 + t % 4; ++k) {
      HRow r;
      r.normal.resize(2 * ny);
      for (auto& v : r.normal) v = g(rng);
      r.offset = 1.5 * std::accumulate(r.normal.begin(), r.normal.end(), 0.0) + 0.3 * g(rng);
      extra.push_back(r);
    }
    HPolytope full = product_polytope(w, ny);
    full.stack(extra);
    VertexSet seeded = enumerate_product_vertices(w, ny, extra);
    VertexSet generic = enumerate_vertices(full);
    CHECK(same_vertex_set(vertex_list(seeded), vertex_list(generic), 1e-8));
    check_vertex_invariants(full, seeded);
  }
}

TEST_CASE("seeded route on segment and point sets") {
  PolygonV seg{{{0, 0}, {2, 1}}};
  VertexSet vs = enumerate_product_vertices(seg, 2, {});
  CHECK(vs.size() == 4);
  std::vector<HRow> cut{{{1, 0, -1, 0}, 0}};  // g(y0).x <= g(y1).x
  HPolytope full = product_polytope(seg, 2);
  full.stack(cut);
  CHECK(same_vertex_set(vertex_list(enumerate_product_vertices(seg, 2, cut)),
                        vertex_list(enumerate_vertices(full)), 1e-9));
  CHECK(enumerate_product_vertices(PolygonV{{{1, 2}}}, 3, {}).size() == 1);
}

TEST_CASE("vertex cap truncates") {
  EnumOptions eo;
  eo.vertex_cap = 100;
  VertexSet vs = enumerate_product_vertices(PolygonV{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, 4, {}, eo);
  CHECK(vs.truncated);
  VertexSet gv = enumerate_vertices(box(8, 0, 1), eo);
  CHECK(gv.truncated);
}

TEST_CASE("affine image") {
  PolygonV square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  VertexSet vs = enumerate_vertices(product_polytope(square, 2));
  // Picking the first block recovers W.
  std::vector<double> pick{1, 0, 0, 0, 0, 1, 0, 0};
  CHECK(convex_hull(affine_image_2d(vs, pick, {0, 0})) == square);
  std::vector<double> zero(8, 0.0);
  for (Point2 p : affine_image_2d(vs, zero, {3, 4})) CHECK(p == Point2{3, 4});

  // Images of random convex combinations of vertices stay in the image hull.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HPolytope p = test::random_hpolytope(rng, 4, 12);
  while (!test::is_bounded(p)) p = test::random_hpolytope(rng, 4, 12);
  VertexSet pv = enumerate_vertices(p);
  std::vector<double> m(8);
  for (auto& v : m) v = g(rng);
  PolygonV image = convex_hull(affine_image_2d(pv, m, {0.5, -0.5}));
  for (int s = 0; s < 500; ++s) {
    std::vector<double> w(pv.size());
    double total = 0;
    for (auto& x : w) total += (x = std::pow(u(rng), 4));
    Point2 q{0.5, -0.5};
    for (std::size_t i = 0; i < pv.size(); ++i) {
      auto x = pv.point(i);
      for (std::size_t j = 0; j < 4; ++j) {
        q.x += w[i] / total * m[j] * x[j];
        q.y += w[i] / total * m[4 + j] * x[j];
      }
    }
    CHECK(distance_to(q, image) <= 1e-9);
  }
}
