#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tempens::detail {

// Dense-tableau dual simplex for   min c.x  s.t.  rows, lb <= x <= ub
// where every structural column is boxed. Each row gets a slack whose
// bounds are finite as well, so any basis can be made dual feasible by
// moving nonbasic columns to the bound matching their reduced cost. That
// makes bound changes and appended rows cheap to re-solve from the current
// basis.
class BoundedDualSimplex {
 public:
  enum class Status { Optimal, Infeasible, Interrupted };
  using Clock = std::chrono::steady_clock;

  // Structural columns with bounds [0, 1].
  explicit BoundedDualSimplex(std::vector<double> cost);

  // Appends  sum(terms) <= rhs  (or = rhs). Columns index structurals.
  void add_row(std::span<const std::pair<int, double>> terms, double rhs,
               bool equality);
  void set_bounds(int col, double lb, double ub);

  Status solve(Clock::time_point deadline);

  int num_structural() const { return n_; }
  int num_rows() const { return static_cast<int>(basic_.size()); }
  double value(int col) const { return x_[col]; }
  double objective() const;
  std::int64_t iterations() const { return iterations_; }

 private:
  void shift_nonbasic(int col, double new_value);
  void refresh();
  void make_dual_feasible();
  void pivot(int row, int col);

  int n_ = 0;
  std::vector<double> cost_, lb_, ub_, x_, d_;
  std::vector<int> basic_;      // basic column per row
  std::vector<int> row_of_;     // row per column, -1 when nonbasic
  std::vector<std::vector<double>> tab_;
  std::vector<double> beta_;
  std::int64_t iterations_ = 0;
};

}  // namespace tempens::detail
