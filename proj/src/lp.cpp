#include "ppe/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ppe::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
// Dantzig pricing until this many pivots, Bland afterwards.
constexpr std::size_t kDantzigPivots = 5000;
constexpr std::size_t kMaxPivots = 200000;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows) * (cols + 1), 0.0),
        basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data_[r * (cols_ + 1) + c];
  }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class Outcome { optimal, unbounded };

// Minimizes cost over the current tableau; `allowed` masks entering columns.
Outcome run_simplex(Tableau& t, const std::vector<double>& cost,
                    const std::vector<bool>& allowed) {
  const std::size_t m = t.rows();
  const std::size_t n = t.cols();
  std::vector<double> reduced(n);
  for (std::size_t it = 0; it < kMaxPivots; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      double r = cost[j];
      for (std::size_t i = 0; i < m; ++i) r -= cost[t.basis()[i]] * t.at(i, j);
      reduced[j] = r;
    }
    const bool bland = it >= kDantzigPivots;
    std::size_t enter = n;
    double best = -kCostTol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!allowed[j] || reduced[j] >= -kCostTol) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (reduced[j] < best) {
        best = reduced[j];
        enter = j;
      }
    }
    if (enter == n) return Outcome::optimal;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      double a = t.at(i, enter);
      if (a <= kPivotTol) continue;
      double ratio = t.rhs(i) / a;
      if (ratio < best_ratio - 1e-14 ||
          (ratio <= best_ratio + 1e-14 && leave < m &&
           t.basis()[i] < t.basis()[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == m) return Outcome::unbounded;
    t.pivot(leave, enter);
  }
  throw std::runtime_error("lp: pivot limit exceeded");
}

}  // namespace

Result minimize(std::span<const double> c, const Inequalities& system) {
  const std::size_t n = system.num_vars;
  const std::size_t m = system.rows.size();
  if (c.size() != n) throw std::invalid_argument("lp: cost size mismatch");

  std::size_t num_art = 0;
  for (double b : system.rhs)
    if (b < 0.0) ++num_art;

  // Columns: x+ [0,n), x- [n,2n), slack [2n,2n+m), artificial after.
  const std::size_t slack0 = 2 * n;
  const std::size_t art0 = slack0 + m;
  const std::size_t cols = art0 + num_art;
  Tableau t(m, cols);

  std::size_t art = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = system.rows[i];
    if (row.size() != n) throw std::invalid_argument("lp: row size mismatch");
    double sign = system.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      t.at(i, j) = sign * row[j];
      t.at(i, n + j) = -sign * row[j];
    }
    t.at(i, slack0 + i) = sign;
    t.rhs(i) = sign * system.rhs[i];
    if (sign < 0.0) {
      t.at(i, art) = 1.0;
      t.basis()[i] = art++;
    } else {
      t.basis()[i] = slack0 + i;
    }
  }

  Result result;
  std::vector<bool> allowed(cols, true);
  if (num_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = art0; j < cols; ++j) phase1[j] = 1.0;
    run_simplex(t, phase1, allowed);
    double infeas = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] >= art0) infeas += t.rhs(i);
      scale = std::max(scale, std::abs(system.rhs[i]));
    }
    if (infeas > 1e-9 * scale) {
      result.status = Status::infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis()[i] < art0) continue;
      std::size_t best = art0;
      double mag = kPivotTol;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(t.at(i, j)) > mag) {
          mag = std::abs(t.at(i, j));
          best = j;
        }
      }
      if (best < art0) t.pivot(i, best);
    }
    for (std::size_t j = art0; j < cols; ++j) allowed[j] = false;
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = c[j];
    cost[n + j] = -c[j];
  }
  if (run_simplex(t, cost, allowed) == Outcome::unbounded) {
    result.status = Status::unbounded;
    return result;
  }

  result.status = Status::optimal;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t b = t.basis()[i];
    if (b < n) result.x[b] += t.rhs(i);
    else if (b < 2 * n) result.x[b - n] -= t.rhs(i);
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace ppe::lp
