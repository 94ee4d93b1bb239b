#include "dual_simplex.hpp"

#include <cmath>
#include <limits>

namespace tempens::detail {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kZeroTol = 1e-12;

}  // namespace

BoundedDualSimplex::BoundedDualSimplex(std::vector<double> cost)
    : n_(static_cast<int>(cost.size())),
      cost_(std::move(cost)),
      lb_(n_, 0.0),
      ub_(n_, 1.0),
      x_(n_, 0.0),
      d_(cost_),
      row_of_(n_, -1) {}

void BoundedDualSimplex::add_row(std::span<const std::pair<int, double>> terms,
                                 double rhs, bool equality) {
  const int slack = static_cast<int>(cost_.size());
  double min_activity = 0.0;
  for (const auto& [col, a] : terms)
    if (a < 0) min_activity += a;

  for (auto& row : tab_) row.push_back(0.0);
  cost_.push_back(0.0);
  lb_.push_back(0.0);
  ub_.push_back(equality ? 0.0 : rhs - min_activity);
  d_.push_back(0.0);
  row_of_.push_back(static_cast<int>(tab_.size()));

  // Express the new row in terms of the current nonbasic columns.
  std::vector<double> row(cost_.size(), 0.0);
  double beta = rhs;
  double activity = 0.0;
  for (const auto& [col, a] : terms) {
    row[col] += a;
    activity += a * x_[col];
  }
  row[slack] = 1.0;
  for (const auto& [col, a] : terms) {
    const int r = row_of_[col];
    if (r < 0) continue;
    const double f = row[col];
    if (std::abs(f) < kZeroTol) continue;
    const auto& basic_row = tab_[r];
    for (std::size_t j = 0; j < basic_row.size(); ++j)
      if (basic_row[j] != 0.0) row[j] -= f * basic_row[j];
    row[col] = 0.0;
    beta -= f * beta_[r];
  }
  tab_.push_back(std::move(row));
  beta_.push_back(beta);
  basic_.push_back(slack);
  x_.push_back(rhs - activity);
}

void BoundedDualSimplex::shift_nonbasic(int col, double new_value) {
  const double delta = new_value - x_[col];
  if (delta == 0.0) return;
  for (std::size_t i = 0; i < tab_.size(); ++i) {
    const double t = tab_[i][col];
    if (t != 0.0) x_[basic_[i]] -= t * delta;
  }
  x_[col] = new_value;
}

void BoundedDualSimplex::set_bounds(int col, double lb, double ub) {
  lb_[col] = lb;
  ub_[col] = ub;
  if (row_of_[col] >= 0) return;
  double target;
  if (lb == ub || d_[col] > kDualTol)
    target = lb;
  else if (d_[col] < -kDualTol)
    target = ub;
  else
    target = x_[col] >= ub ? ub : lb;
  shift_nonbasic(col, target);
}

void BoundedDualSimplex::refresh() {
  const std::size_t ncols = cost_.size();
  // Reduced costs d = c - c_B T.
  d_ = cost_;
  for (std::size_t i = 0; i < tab_.size(); ++i) {
    const double cb = cost_[basic_[i]];
    if (cb == 0.0) continue;
    const auto& row = tab_[i];
    for (std::size_t j = 0; j < ncols; ++j)
      if (row[j] != 0.0) d_[j] -= cb * row[j];
  }
  for (int b : basic_) d_[b] = 0.0;

  // Basic values x_B = beta - T_N x_N.
  for (std::size_t i = 0; i < tab_.size(); ++i) {
    const auto& row = tab_[i];
    double v = beta_[i];
    for (std::size_t j = 0; j < ncols; ++j)
      if (row[j] != 0.0 && row_of_[j] < 0 && x_[j] != 0.0) v -= row[j] * x_[j];
    x_[basic_[i]] = v;
  }
}

void BoundedDualSimplex::make_dual_feasible() {
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    if (row_of_[j] >= 0 || lb_[j] == ub_[j]) {
      if (row_of_[j] < 0 && x_[j] != lb_[j]) shift_nonbasic(int(j), lb_[j]);
      continue;
    }
    if (d_[j] > kDualTol && x_[j] != lb_[j])
      shift_nonbasic(static_cast<int>(j), lb_[j]);
    else if (d_[j] < -kDualTol && x_[j] != ub_[j])
      shift_nonbasic(static_cast<int>(j), ub_[j]);
    else if (x_[j] != lb_[j] && x_[j] != ub_[j])
      shift_nonbasic(static_cast<int>(j), lb_[j]);
  }
}

void BoundedDualSimplex::pivot(int r, int q) {
  auto& prow = tab_[r];
  const double piv = prow[q];
  const std::size_t ncols = prow.size();
  for (std::size_t j = 0; j < ncols; ++j)
    if (prow[j] != 0.0) prow[j] /= piv;
  prow[q] = 1.0;
  beta_[r] /= piv;

  // Nonzero pattern of the pivot row drives the elimination.
  std::vector<std::size_t> nz;
  nz.reserve(ncols);
  for (std::size_t j = 0; j < ncols; ++j)
    if (prow[j] != 0.0) nz.push_back(j);

  for (std::size_t i = 0; i < tab_.size(); ++i) {
    if (static_cast<int>(i) == r) continue;
    auto& row = tab_[i];
    const double f = row[q];
    if (f == 0.0) continue;
    for (std::size_t j : nz) {
      double v = row[j] - f * prow[j];
      row[j] = std::abs(v) < kZeroTol ? 0.0 : v;
    }
    row[q] = 0.0;
    beta_[i] -= f * beta_[r];
  }

  const double dq = d_[q];
  if (dq != 0.0)
    for (std::size_t j : nz) d_[j] -= dq * prow[j];
  d_[q] = 0.0;

  const int leaving = basic_[r];
  basic_[r] = q;
  row_of_[q] = r;
  row_of_[leaving] = -1;
}

BoundedDualSimplex::Status BoundedDualSimplex::solve(Clock::time_point deadline) {
  refresh();
  make_dual_feasible();

  const std::size_t ncols = cost_.size();
  // Switch to smallest-index rules if the largest-infeasibility rule has
  // not converged by then; those rules cannot cycle.
  const std::int64_t bland_after =
      20 * static_cast<std::int64_t>(ncols + tab_.size()) + 1000;
  std::int64_t local_iters = 0;

  while (true) {
    if ((local_iters & 63) == 0 && Clock::now() > deadline)
      return Status::Interrupted;
    const bool bland = local_iters > bland_after;

    int r = -1;
    double worst = kFeasTol;
    for (std::size_t i = 0; i < basic_.size(); ++i) {
      const int b = basic_[i];
      const double viol = std::max(lb_[b] - x_[b], x_[b] - ub_[b]);
      if (viol <= kFeasTol) continue;
      if (bland) {
        if (r < 0 || b < basic_[r]) r = static_cast<int>(i);
      } else if (viol > worst) {
        worst = viol;
        r = static_cast<int>(i);
      }
    }
    if (r < 0) return Status::Optimal;

    const int p = basic_[r];
    const bool to_lower = x_[p] < lb_[p];
    const double target = to_lower ? lb_[p] : ub_[p];
    const auto& prow = tab_[r];

    // Harris ratio test: bound the step with a relaxed tolerance, then pick
    // the largest pivot among the columns within that bound.
    auto eligible = [&](std::size_t j) -> bool {
      if (row_of_[j] >= 0 || lb_[j] == ub_[j]) return false;
      const double t = prow[j];
      if (std::abs(t) < kPivotTol) return false;
      const bool at_lower = x_[j] == lb_[j];
      // Raising x_p needs t < 0 at lower or t > 0 at upper; lowering the
      // reverse.
      return to_lower ? (at_lower ? t < 0 : t > 0) : (at_lower ? t > 0 : t < 0);
    };

    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!eligible(j)) continue;
      const double ratio = (std::abs(d_[j]) + kDualTol) / std::abs(prow[j]);
      if (ratio < bound) bound = ratio;
    }
    if (!std::isfinite(bound)) return Status::Infeasible;

    int q = -1;
    double best_pivot = 0.0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!eligible(j)) continue;
      const double ratio = std::abs(d_[j]) / std::abs(prow[j]);
      if (ratio > bound) continue;
      if (bland) {
        if (ratio < best_ratio) {
          best_ratio = ratio;
          q = static_cast<int>(j);
        }
        continue;
      }
      if (std::abs(prow[j]) > best_pivot) {
        best_pivot = std::abs(prow[j]);
        q = static_cast<int>(j);
      }
    }

    // Primal step: move x_q until x_p reaches its violated bound.
    const double delta = (x_[p] - target) / prow[q];
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      const double t = tab_[i][q];
      if (t != 0.0) x_[basic_[i]] -= t * delta;
    }
    x_[q] += delta;
    x_[p] = target;

    pivot(r, q);
    // Dual feasibility slack admitted by the Harris test.
    for (std::size_t j = 0; j < ncols; ++j) {
      if (row_of_[j] >= 0 || lb_[j] == ub_[j]) continue;
      if (x_[j] == lb_[j] && d_[j] < 0.0 && d_[j] > -kDualTol) d_[j] = 0.0;
      if (x_[j] == ub_[j] && d_[j] > 0.0 && d_[j] < kDualTol) d_[j] = 0.0;
    }
    ++iterations_;
    ++local_iters;
  }
}

double BoundedDualSimplex::objective() const {
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
  return obj;
}

}  // namespace tempens::detail
