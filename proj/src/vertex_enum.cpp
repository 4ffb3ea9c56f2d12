#include "ppe/vertex_enum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "ppe/lp.hpp"

namespace ppe {
namespace {

// Fixed-width bit rows stored contiguously, one row per vertex or ray.
class BitRows {
 public:
  explicit BitRows(std::size_t bits = 0) : words_((bits + 63) / 64) {}

  std::size_t words() const { return words_; }
  std::size_t rows() const { return count_; }

  std::size_t add_row() {
    data_.resize(data_.size() + words_, 0);
    return count_++;
  }
  std::uint64_t* row(std::size_t r) { return data_.data() + r * words_; }
  const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }

  void set(std::size_t r, std::size_t bit) { row(r)[bit / 64] |= std::uint64_t{1} << (bit % 64); }
  bool test(std::size_t r, std::size_t bit) const {
    return (row(r)[bit / 64] >> (bit % 64)) & 1u;
  }

  void clear() {
    data_.clear();
    count_ = 0;
  }

 private:
  std::size_t words_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> data_;
};

std::size_t popcount_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::size_t c = 0;
  for (std::size_t k = 0; k < words; ++k) c += std::popcount(a[k] & b[k]);
  return c;
}

// (a & b) subset of c
bool and_subset(const std::uint64_t* a, const std::uint64_t* b, const std::uint64_t* c,
                std::size_t words) {
  for (std::size_t k = 0; k < words; ++k)
    if ((a[k] & b[k]) & ~c[k]) return false;
  return true;
}

std::vector<std::size_t> bits_of(const std::uint64_t* a, const std::uint64_t* b,
                                 std::size_t words) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < words; ++k) {
    std::uint64_t w = a[k] & b[k];
    while (w) {
      out.push_back(k * 64 + std::countr_zero(w));
      w &= w - 1;
    }
  }
  return out;
}

std::size_t matrix_rank(const std::vector<const double*>& rows, std::size_t dim) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(lu.rank());
}

double dot_n(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void normalize(double* v, std::size_t n) {
  double len = std::sqrt(dot_n(v, v, n));
  if (len > 0.0)
    for (std::size_t i = 0; i < n; ++i) v[i] /= len;
}

// Unit-normal copy of a row; returns false for a zero normal.
bool unit_row(const HRow& in, HRow& out) {
  double len = std::sqrt(dot_n(in.normal.data(), in.normal.data(), in.normal.size()));
  if (len == 0.0) return false;
  out.normal.resize(in.normal.size());
  for (std::size_t i = 0; i < in.normal.size(); ++i) out.normal[i] = in.normal[i] / len;
  out.offset = in.offset / len;
  return true;
}

// Union-find clustering of points closer than eps; returns the cluster id
// of every point (the smallest member index). Candidates are found by a
// sweep along a fixed generic direction, so distinct points sharing
// coordinates do not pile up in one window.
std::vector<std::size_t> cluster_points(const std::vector<double>& coords,
                                        std::span<const std::size_t> members,
                                        std::size_t dim, double eps) {
  std::vector<std::size_t> parent(members.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<double> dir(dim);
  for (std::size_t k = 0; k < dim; ++k) dir[k] = 1.0 + 0.6180339887498949 * double(k);
  normalize(dir.data(), dim);
  std::vector<double> key(members.size());
  for (std::size_t i = 0; i < members.size(); ++i)
    key[i] = dot_n(dir.data(), coords.data() + members[i] * dim, dim);
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key[a] < key[b] || (key[a] == key[b] && a < b);
  });
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      std::size_t i = order[oi], j = order[oj];
      if (key[j] - key[i] > eps) break;
      const double* a = coords.data() + members[i] * dim;
      const double* b = coords.data() + members[j] * dim;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      if (d2 <= eps * eps) {
        std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<std::size_t> out(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) out[i] = find(i);
  return out;
}

// Lexicographically sorted VertexSet with active sets recomputed against
// the given rows.
VertexSet finish(std::size_t dim, std::vector<double> coords, const std::vector<HRow>& rows,
                 double eps_side, double eps_point, bool truncated) {
  std::size_t n = dim == 0 ? 0 : coords.size() / dim;

  // Merge near-duplicates by centroid.
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  auto cid = cluster_points(coords, all, dim, eps_point);
  std::vector<double> merged;
  std::vector<std::size_t> slot(n, n);
  std::vector<std::size_t> weight;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = cid[i];
    if (slot[r] == n) {
      slot[r] = weight.size();
      weight.push_back(0);
      merged.resize(merged.size() + dim, 0.0);
    }
    std::size_t s = slot[r];
    for (std::size_t k = 0; k < dim; ++k) merged[s * dim + k] += coords[i * dim + k];
    ++weight[s];
  }
  for (std::size_t s = 0; s < weight.size(); ++s)
    for (std::size_t k = 0; k < dim; ++k) merged[s * dim + k] /= double(weight[s]);

  std::size_t m = weight.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(merged.begin() + a * dim, merged.begin() + (a + 1) * dim,
                                        merged.begin() + b * dim, merged.begin() + (b + 1) * dim);
  });

  VertexSet out;
  out.dim = dim;
  out.truncated = truncated;
  out.coords.reserve(m * dim);
  out.active.reserve(m);
  for (std::size_t s : order) {
    const double* x = merged.data() + s * dim;
    out.coords.insert(out.coords.end(), x, x + dim);
    std::vector<std::size_t> act;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      double len = std::sqrt(dot_n(row.normal.data(), row.normal.data(), dim));
      double slack = dot_n(row.normal.data(), x, dim) - row.offset;
      double scale = len > 0.0 ? len : 1.0;
      if (std::abs(slack) <= eps_side * scale) act.push_back(r);
    }
    out.active.push_back(std::move(act));
  }
  return out;
}

// Insertion order: tightest rows at the Chebyshev center first.
std::vector<std::size_t> chebyshev_order(const std::vector<HRow>& rows, std::size_t dim) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  if (rows.empty()) return order;

  lp::Inequalities sys;
  sys.num_vars = dim + 1;
  double big = 1.0;
  for (const auto& r : rows) {
    std::vector<double> a = r.normal;
    a.push_back(1.0);
    sys.add(std::move(a), r.offset);
    big = std::max(big, std::abs(r.offset));
  }
  std::vector<double> cap(dim + 1, 0.0);
  cap[dim] = 1.0;
  sys.add(cap, 1e3 * big);
  std::vector<double> c(dim + 1, 0.0);
  c[dim] = -1.0;
  lp::Result res;
  try {
    res = lp::minimize(c, sys);
  } catch (const std::exception&) {
    return order;
  }
  if (res.status != lp::Status::optimal) return order;

  std::vector<double> slack(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    slack[i] = rows[i].offset - dot_n(rows[i].normal.data(), res.x.data(), dim);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return slack[a] < slack[b]; });
  return order;
}

}  // namespace

HPolytope product_polytope(const PolygonV& w, std::size_t num_signals) {
  HPolytope out;
  out.dim = 2 * num_signals;
  auto base = constraint_rows(w);
  for (std::size_t y = 0; y < num_signals; ++y) {
    for (const auto& r : base) {
      HRow row;
      row.normal.assign(out.dim, 0.0);
      row.normal[2 * y] = r.normal.x;
      row.normal[2 * y + 1] = r.normal.y;
      row.offset = r.offset;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Textbook double description on the homogenized cone
//   C = {(x, t) : a.x - b t <= 0 for every row, t >= 0},
// starting from C = R^{dim+1} held entirely as lineality space.

VertexSet enumerate_vertices(const HPolytope& p, const EnumOptions& opts) {
  const std::size_t dim = p.dim;
  const std::size_t D = dim + 1;

  std::vector<HRow> unit;
  for (const auto& r : p.rows) {
    if (r.normal.size() != dim)
      throw std::invalid_argument("enumerate_vertices: row dimension mismatch");
    HRow u;
    if (unit_row(r, u)) {
      unit.push_back(std::move(u));
    } else if (r.offset < -opts.eps_side) {
      return finish(dim, {}, p.rows, opts.eps_side, opts.eps_point, false);
    }
  }

  // Homogenized rows in insertion order; the t >= 0 row goes first.
  std::vector<std::vector<double>> hrows;
  hrows.push_back(std::vector<double>(D, 0.0));
  hrows[0][dim] = -1.0;
  for (std::size_t i : chebyshev_order(unit, dim)) {
    std::vector<double> h = unit[i].normal;
    h.push_back(-unit[i].offset);
    normalize(h.data(), D);
    hrows.push_back(std::move(h));
  }

  std::vector<std::vector<double>> lineality;
  for (std::size_t i = 0; i < D; ++i) {
    lineality.emplace_back(D, 0.0);
    lineality.back()[i] = 1.0;
  }
  std::vector<double> rays;  // D per ray, unit length
  BitRows act(hrows.size());
  const double tol = opts.eps_side;
  bool truncated = false;

  auto ray = [&](std::size_t r) { return rays.data() + r * D; };
  auto num_rays = [&] { return rays.size() / D; };

  for (std::size_t k = 0; k < hrows.size() && !truncated; ++k) {
    const double* h = hrows[k].data();

    std::size_t pick = lineality.size();
    double best = 1e-12;
    for (std::size_t i = 0; i < lineality.size(); ++i) {
      double v = std::abs(dot_n(h, lineality[i].data(), D));
      if (v > best) {
        best = v;
        pick = i;
      }
    }

    if (pick < lineality.size()) {
      // The row cuts a lineality direction: it becomes a ray and everything
      // else is projected into the row's hyperplane.
      std::vector<double> l = lineality[pick];
      double hl = dot_n(h, l.data(), D);
      if (hl > 0) {
        for (double& v : l) v = -v;
        hl = -hl;
      }
      lineality.erase(lineality.begin() + pick);
      for (auto& other : lineality) {
        double f = dot_n(h, other.data(), D) / hl;
        for (std::size_t j = 0; j < D; ++j) other[j] -= f * l[j];
      }
      for (std::size_t r = 0; r < num_rays(); ++r) {
        double* x = ray(r);
        double f = dot_n(h, x, D) / hl;
        for (std::size_t j = 0; j < D; ++j) x[j] -= f * l[j];
        normalize(x, D);
        act.set(r, k);
      }
      std::size_t r = act.add_row();
      for (std::size_t j = 0; j < k; ++j) act.set(r, j);
      normalize(l.data(), D);
      rays.insert(rays.end(), l.begin(), l.end());
      continue;
    }

    const std::size_t n = num_rays();
    std::vector<double> s(n);
    std::vector<std::size_t> plus, minus, zero;
    for (std::size_t r = 0; r < n; ++r) {
      s[r] = dot_n(h, ray(r), D);
      if (s[r] < -tol) plus.push_back(r);
      else if (s[r] > tol) minus.push_back(r);
      else zero.push_back(r);
    }
    for (std::size_t r : zero) act.set(r, k);
    if (minus.empty()) continue;

    const std::size_t need = D - lineality.size() - 2;
    const std::size_t words = act.words();
    const bool combinatorial =
        opts.adjacency == AdjacencyTest::combinatorial ||
        (opts.adjacency == AdjacencyTest::automatic && n <= 512);

    std::vector<double> fresh;
    BitRows fresh_act(hrows.size());
    for (std::size_t pi : plus) {
      for (std::size_t mi : minus) {
        const std::uint64_t* zp = act.row(pi);
        const std::uint64_t* zm = act.row(mi);
        if (popcount_and(zp, zm, words) < need) continue;
        bool adjacent = true;
        if (combinatorial) {
          for (std::size_t r = 0; r < n && adjacent; ++r)
            if (r != pi && r != mi && and_subset(zp, zm, act.row(r), words)) adjacent = false;
        } else {
          std::vector<const double*> rs;
          for (std::size_t b : bits_of(zp, zm, words)) rs.push_back(hrows[b].data());
          adjacent = matrix_rank(rs, D) == need;
        }
        if (!adjacent) continue;
        std::size_t base = fresh.size();
        fresh.resize(base + D);
        for (std::size_t j = 0; j < D; ++j)
          fresh[base + j] = s[mi] * ray(pi)[j] - s[pi] * ray(mi)[j];
        normalize(fresh.data() + base, D);
        std::size_t fr = fresh_act.add_row();
        for (std::size_t w = 0; w < words; ++w) fresh_act.row(fr)[w] = zp[w] & zm[w];
        fresh_act.set(fr, k);
      }
    }

    std::vector<double> next;
    BitRows next_act(hrows.size());
    auto keep = [&](const double* x, const std::uint64_t* bits) {
      next.insert(next.end(), x, x + D);
      std::size_t r = next_act.add_row();
      std::copy(bits, bits + words, next_act.row(r));
    };
    for (std::size_t r = 0; r < n; ++r)
      if (s[r] <= tol) keep(ray(r), act.row(r));
    for (std::size_t r = 0; r < fresh_act.rows(); ++r)
      keep(fresh.data() + r * D, fresh_act.row(r));
    rays = std::move(next);
    act = std::move(next_act);
    if (num_rays() > opts.vertex_cap) truncated = true;
  }

  std::vector<double> verts;
  bool recession = !lineality.empty();
  for (std::size_t r = 0; r < num_rays(); ++r) {
    const double* x = ray(r);
    if (x[dim] > tol) {
      for (std::size_t j = 0; j < dim; ++j) verts.push_back(x[j] / x[dim]);
    } else {
      recession = true;
    }
  }
  if (verts.empty())
    return finish(dim, {}, p.rows, opts.eps_side, opts.eps_point, truncated);
  if (recession && !truncated)
    throw UnboundedPolytopeError("enumerate_vertices: polyhedron is unbounded");
  return finish(dim, std::move(verts), p.rows, opts.eps_side, opts.eps_point, truncated);
}

// ---------------------------------------------------------------------------
// Seeded double description on a polytope with an explicit edge graph.
//
// Cutting P by a.x <= b keeps the vertices on the feasible side, adds one
// vertex per edge that crosses the hyperplane, and keeps every old edge that
// does not lie inside the hyperplane. Edges inside the new facet F are found
// by an adjacency test among F's vertices only.

namespace {

struct GraphPolytope {
  std::size_t dim = 0;
  std::vector<double> coords;
  BitRows act;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::size_t size() const { return coords.size() / dim; }
  const double* x(std::size_t i) const { return coords.data() + i * dim; }
};

enum class CutOutcome { ok, empty };

CutOutcome cut(GraphPolytope& P, const double* a, double b, std::size_t bit,
               const std::vector<std::vector<double>>& normals, const EnumOptions& opts) {
  const std::size_t n = P.size();
  const std::size_t dim = P.dim;
  const std::size_t words = P.act.words();
  const double tol = opts.eps_side;

  enum Side : unsigned char { kPlus, kZero, kMinus };
  std::vector<double> s(n);
  std::vector<Side> side(n);
  bool any_minus = false, any_keep = false;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = dot_n(a, P.x(i), dim) - b;
    side[i] = s[i] < -tol ? kPlus : (s[i] > tol ? kMinus : kZero);
    any_minus |= side[i] == kMinus;
    any_keep |= side[i] != kMinus;
  }
  if (!any_keep) return CutOutcome::empty;
  if (!any_minus) {
    for (std::size_t i = 0; i < n; ++i)
      if (side[i] == kZero) P.act.set(i, bit);
    return CutOutcome::ok;
  }

  GraphPolytope Q;
  Q.dim = dim;
  Q.act = BitRows(words * 64);
  std::vector<std::uint32_t> map(n, UINT32_MAX);
  std::vector<std::size_t> facet;  // vertices of the new facet, in Q
  for (std::size_t i = 0; i < n; ++i) {
    if (side[i] == kMinus) continue;
    map[i] = static_cast<std::uint32_t>(Q.size());
    Q.coords.insert(Q.coords.end(), P.x(i), P.x(i) + dim);
    std::size_t r = Q.act.add_row();
    std::copy(P.act.row(i), P.act.row(i) + words, Q.act.row(r));
    if (side[i] == kZero) {
      Q.act.set(r, bit);
      facet.push_back(r);
    }
  }
  for (auto [u, v] : P.edges) {
    Side su = side[u], sv = side[v];
    if (su != kMinus && sv != kMinus) {
      if (!(su == kZero && sv == kZero)) Q.edges.push_back({map[u], map[v]});
      continue;
    }
    if (su == kZero || sv == kZero || (su == kMinus && sv == kMinus)) continue;
    std::size_t in = su == kPlus ? u : v;
    std::size_t out = su == kPlus ? v : u;
    double t = s[in] / (s[in] - s[out]);
    std::size_t r = Q.act.add_row();
    Q.coords.resize(Q.coords.size() + dim);
    double* xr = Q.coords.data() + r * dim;
    for (std::size_t j = 0; j < dim; ++j) xr[j] = P.x(in)[j] + t * (P.x(out)[j] - P.x(in)[j]);
    for (std::size_t w = 0; w < words; ++w) Q.act.row(r)[w] = P.act.row(in)[w] & P.act.row(out)[w];
    Q.act.set(r, bit);
    Q.edges.push_back({map[in], static_cast<std::uint32_t>(r)});
    facet.push_back(r);
  }

  // Merge near-duplicate facet vertices.
  auto cid = cluster_points(Q.coords, facet, dim, opts.eps_point);
  std::vector<std::uint32_t> remap(Q.size());
  std::iota(remap.begin(), remap.end(), 0);
  bool merged = false;
  for (std::size_t i = 0; i < facet.size(); ++i) {
    if (cid[i] == i) continue;
    merged = true;
    std::size_t rep = facet[cid[i]], me = facet[i];
    remap[me] = static_cast<std::uint32_t>(rep);
    for (std::size_t w = 0; w < words; ++w) Q.act.row(rep)[w] |= Q.act.row(me)[w];
  }
  if (merged) {
    // Centroids, then compaction.
    std::vector<std::size_t> count(Q.size(), 1);
    std::vector<double> sum(Q.coords);
    for (std::size_t i = 0; i < facet.size(); ++i) {
      std::size_t me = facet[i], rep = remap[me];
      if (rep == me) continue;
      for (std::size_t j = 0; j < dim; ++j) sum[rep * dim + j] += Q.coords[me * dim + j];
      ++count[rep];
    }
    GraphPolytope R;
    R.dim = dim;
    R.act = BitRows(words * 64);
    std::vector<std::uint32_t> slot(Q.size(), UINT32_MAX);
    for (std::size_t i = 0; i < Q.size(); ++i) {
      if (remap[i] != i) continue;
      slot[i] = static_cast<std::uint32_t>(R.size());
      for (std::size_t j = 0; j < dim; ++j) R.coords.push_back(sum[i * dim + j] / double(count[i]));
      std::size_t r = R.act.add_row();
      std::copy(Q.act.row(i), Q.act.row(i) + words, R.act.row(r));
    }
    for (auto [u, v] : Q.edges) {
      std::uint32_t a2 = slot[remap[u]], b2 = slot[remap[v]];
      if (a2 != b2) R.edges.push_back({a2, b2});
    }
    std::vector<std::size_t> f2;
    for (std::size_t i : facet)
      if (remap[i] == i) f2.push_back(slot[i]);
    Q = std::move(R);
    facet = std::move(f2);
  }

  // Edges inside the new facet.
  const std::size_t need = dim - 1;
  const bool combinatorial =
      opts.adjacency == AdjacencyTest::combinatorial ||
      (opts.adjacency == AdjacencyTest::automatic && facet.size() <= 256);
  for (std::size_t i = 0; i < facet.size(); ++i) {
    const std::uint64_t* zi = Q.act.row(facet[i]);
    for (std::size_t j = i + 1; j < facet.size(); ++j) {
      const std::uint64_t* zj = Q.act.row(facet[j]);
      if (popcount_and(zi, zj, words) < need) continue;
      bool adjacent = true;
      if (combinatorial) {
        for (std::size_t k = 0; k < facet.size() && adjacent; ++k)
          if (k != i && k != j && and_subset(zi, zj, Q.act.row(facet[k]), words))
            adjacent = false;
      } else {
        std::vector<const double*> rs;
        for (std::size_t r : bits_of(zi, zj, words)) rs.push_back(normals[r].data());
        adjacent = matrix_rank(rs, dim) == need;
      }
      if (adjacent)
        Q.edges.push_back({static_cast<std::uint32_t>(facet[i]), static_cast<std::uint32_t>(facet[j])});
    }
  }
  for (auto& e : Q.edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(Q.edges.begin(), Q.edges.end());
  Q.edges.erase(std::unique(Q.edges.begin(), Q.edges.end()), Q.edges.end());
  P = std::move(Q);
  return CutOutcome::ok;
}

}  // namespace

VertexSet enumerate_product_vertices(const PolygonV& w, std::size_t num_signals,
                                     std::span<const HRow> extra_rows,
                                     const EnumOptions& opts) {
  HPolytope stacked = product_polytope(w, num_signals);
  stacked.stack(extra_rows);
  const std::size_t dim = stacked.dim;
  const auto base = constraint_rows(w);
  const std::size_t rw = base.size();
  const std::size_t m = w.size();

  auto fail = [&](bool truncated) {
    return finish(dim, {}, stacked.rows, opts.eps_side, opts.eps_point, truncated);
  };

  double count = std::pow(double(m), double(num_signals));
  if (count > double(opts.vertex_cap)) return fail(true);
  const std::size_t total = static_cast<std::size_t>(count);

  // Factor: tight rows and cycle neighbours of each vertex of w.
  std::vector<std::vector<std::size_t>> factor_act(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < rw; ++j)
      if (std::abs(dot(base[j].normal, w.vertices[i]) - base[j].offset) <= opts.eps_side)
        factor_act[i].push_back(j);
  std::vector<std::pair<std::size_t, std::size_t>> factor_edges;
  if (m == 2) factor_edges.push_back({0, 1});
  if (m >= 3)
    for (std::size_t i = 0; i < m; ++i) factor_edges.push_back({i, (i + 1) % m});

  GraphPolytope P;
  P.dim = dim;
  P.act = BitRows(stacked.rows.size());
  std::vector<std::size_t> stride(num_signals, 1);
  for (std::size_t y = 1; y < num_signals; ++y) stride[y] = stride[y - 1] * m;
  P.coords.resize(total * dim);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t r = P.act.add_row();
    for (std::size_t y = 0; y < num_signals; ++y) {
      std::size_t i = (t / stride[y]) % m;
      P.coords[t * dim + 2 * y] = w.vertices[i].x;
      P.coords[t * dim + 2 * y + 1] = w.vertices[i].y;
      for (std::size_t j : factor_act[i]) P.act.set(r, y * rw + j);
    }
  }
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t y = 0; y < num_signals; ++y) {
      std::size_t i = (t / stride[y]) % m;
      for (auto [a, b] : factor_edges) {
        if (a != i) continue;
        std::size_t u = b > i ? t + (b - i) * stride[y] : t - (i - b) * stride[y];
        P.edges.push_back({static_cast<std::uint32_t>(std::min(t, u)),
                           static_cast<std::uint32_t>(std::max(t, u))});
      }
    }
  }

  std::vector<std::vector<double>> normals;
  for (const auto& r : stacked.rows) {
    HRow u;
    if (unit_row(r, u)) normals.push_back(u.normal);
    else normals.push_back(std::vector<double>(dim, 0.0));
  }

  for (std::size_t k = 0; k < extra_rows.size(); ++k) {
    const std::size_t bit = num_signals * rw + k;
    HRow u;
    if (!unit_row(extra_rows[k], u)) {
      if (extra_rows[k].offset < -opts.eps_side) return fail(false);
      continue;
    }
    if (cut(P, u.normal.data(), u.offset, bit, normals, opts) == CutOutcome::empty)
      return fail(false);
    if (P.size() > opts.vertex_cap) {
      return finish(dim, std::move(P.coords), stacked.rows, opts.eps_side, opts.eps_point, true);
    }
  }
  return finish(dim, std::move(P.coords), stacked.rows, opts.eps_side, opts.eps_point, false);
}

std::vector<Point2> affine_image_2d(const VertexSet& vs, std::span<const double> m, Point2 c) {
  const std::size_t dim = vs.dim;
  if (m.size() != 2 * dim) throw std::invalid_argument("affine_image_2d: map size mismatch");
  std::vector<Point2> out;
  out.reserve(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto x = vs.point(i);
    out.push_back({c.x + dot_n(m.data(), x.data(), dim),
                   c.y + dot_n(m.data() + dim, x.data(), dim)});
  }
  return out;
}

}  // namespace ppe
