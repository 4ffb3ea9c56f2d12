#pragma once

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ppe/game.hpp"

namespace ppe::test {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

inline StageGame load_game(const std::string& name) {
  return parse_game(read_file(std::string(PPE_GAMES_DIR) + "/" + name));
}

// Integer payoffs in [-5, 5] and a random full-support-or-not signal law.
inline StageGame random_game(std::mt19937_64& rng, std::size_t n1, std::size_t n2,
                             std::size_t ny) {
  std::uniform_int_distribution<int> pay(-5, 5);
  std::uniform_int_distribution<int> weight(0, 4);
  std::array<std::vector<std::string>, 2> actions;
  for (std::size_t i = 0; i < n1; ++i) actions[0].push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < n2; ++i) actions[1].push_back("b" + std::to_string(i));
  std::vector<std::string> signals;
  for (std::size_t y = 0; y < ny; ++y) signals.push_back("y" + std::to_string(y));
  std::vector<Point2> payoffs;
  std::vector<std::vector<double>> probs;
  for (std::size_t k = 0; k < n1 * n2; ++k) {
    payoffs.push_back({double(pay(rng)), double(pay(rng))});
    std::vector<double> w(ny);
    double total = 0;
    while (total == 0) {
      total = 0;
      for (auto& x : w) total += (x = weight(rng));
    }
    for (auto& x : w) x /= total;
    probs.push_back(w);
  }
  return StageGame(actions, signals, payoffs, probs);
}

}  // namespace ppe::test

namespace ppe::test {

// Hull vertices by brute force: i is a vertex when some directed pair (i, j)
// has every other point on its left, collinear ones lying between i and j.
inline std::vector<Point2> brute_force_hull_vertices(std::vector<Point2> pts,
                                                     double eps = 1e-12) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 1) return pts;
  std::vector<Point2> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool vertex = false;
    for (std::size_t j = 0; j < pts.size() && !vertex; ++j) {
      if (pts[i] == pts[j]) continue;
      Point2 e = pts[j] - pts[i];
      bool edge = true;
      for (std::size_t k = 0; k < pts.size() && edge; ++k) {
        Point2 f = pts[k] - pts[i];
        double c = cross(e, f);
        if (c < -eps) edge = false;
        else if (std::abs(c) <= eps) edge = dot(f, e) >= -eps && dot(f, e) <= dot(e, e) + eps;
      }
      vertex = edge;
    }
    if (vertex && std::find(out.begin(), out.end(), pts[i]) == out.end()) out.push_back(pts[i]);
  }
  return out;
}

// True when both lists hold the same points within tol, in any order.
inline bool same_point_set(std::vector<Point2> a, std::vector<Point2> b, double tol) {
  if (a.size() != b.size()) return false;
  for (Point2 p : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](Point2 q) { return distance(p, q) <= tol; });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return true;
}

}  // namespace ppe::test

#include <Eigen/Dense>
#include <functional>

#include "ppe/lp.hpp"
#include "ppe/vertex_enum.hpp"

namespace ppe::test {

// Every dim-subset of rows solved as equalities, kept when feasible, then
// deduplicated within tol.
inline std::vector<std::vector<double>> brute_force_vertices(const HPolytope& p, double tol) {
  const std::size_t n = p.dim, m = p.rows.size();
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = p.rows[pick[i]].normal[j];
        b(i) = p.rows[pick[i]].offset;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      lu.setThreshold(1e-10);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      Eigen::VectorXd x = lu.solve(b);
      for (const auto& r : p.rows) {
        double lhs = 0;
        for (std::size_t j = 0; j < n; ++j) lhs += r.normal[j] * x(j);
        if (lhs > r.offset + 1e-9) return;
      }
      std::vector<double> v(x.data(), x.data() + n);
      for (const auto& w : out) {
        double d = 0;
        for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(w[j] - v[j]));
        if (d <= tol) return;
      }
      out.push_back(v);
      return;
    }
    for (std::size_t k = start; k < m; ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

inline std::vector<std::vector<double>> vertex_list(const VertexSet& vs) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto pt = vs.point(i);
    out.emplace_back(pt.begin(), pt.end());
  }
  return out;
}

// Set equality of point lists under the max-norm.
inline bool same_vertex_set(std::vector<std::vector<double>> a, std::vector<std::vector<double>> b,
                            double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const std::vector<double>& q) {
      for (std::size_t j = 0; j < p.size(); ++j)
        if (std::abs(p[j] - q[j]) > tol) return false;
      return true;
    });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return true;
}

// Bounded iff every coordinate is bounded above and below.
inline bool is_bounded(const HPolytope& p) {
  lp::Inequalities s;
  s.num_vars = p.dim;
  for (const auto& r : p.rows) s.add(r.normal, r.offset);
  for (std::size_t j = 0; j < p.dim; ++j)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> c(p.dim, 0.0);
      c[j] = sign;
      auto res = lp::minimize(c, s);
      if (res.status == lp::Status::unbounded) return false;
      if (res.status == lp::Status::infeasible) return true;
    }
  return true;
}

// Random system with unit normals around an interior origin, sometimes
// with a row pushed through an existing vertex to create degeneracy.
inline HPolytope random_hpolytope(std::mt19937_64& rng, std::size_t dim, std::size_t rows) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  HPolytope p;
  p.dim = dim;
  for (std::size_t k = 0; k < rows; ++k) {
    HRow r;
    r.normal.resize(dim);
    double len = 0;
    for (auto& v : r.normal) len += (v = g(rng)) * v;
    for (auto& v : r.normal) v /= std::sqrt(len);
    r.offset = u(rng);
    p.rows.push_back(r);
  }
  return p;
}

}  // namespace ppe::test
