#include "tempens/ip_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "dual_simplex.hpp"

namespace tempens {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::TimeLimit: return "time-limit";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NoSolutionFound: return "no-solution";
  }
  return "?";
}

double assignment_objective(const BinaryProgram& program,
                            const std::vector<RelType>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    total += program.weight(i, assignment[i]);
  return total;
}

namespace {

bool row_holds(const TriangleRow& row, const std::vector<RelType>& labels) {
  if (labels[BinaryProgram::arc_of(row.plus1)] != row.a) return true;
  if (labels[BinaryProgram::arc_of(row.plus2)] != row.b) return true;
  const RelType c = labels[row.minus_arc];
  if (c == RelType::None) return row.none_relaxes;
  return row.conclusions.contains(c);
}

Solution make_solution(const BinaryProgram& program,
                       std::vector<RelType> assignment, SolveStatus status) {
  Solution s;
  s.status = status;
  s.proven_optimal = status == SolveStatus::Optimal;
  s.values.assign(program.num_vars(), 0);
  for (std::size_t i = 0; i < assignment.size(); ++i)
    s.values[BinaryProgram::var_index(i, assignment[i])] = 1;
  s.objective_value = assignment_objective(program, assignment);
  s.assignment = std::move(assignment);
  return s;
}

// Columns kept after presolve plus the triangle rows expressed over them.
//
// x_{i,j} is dropped when x_{i,NONE} dominates it: NONE weighs at least as
// much and never has a larger coefficient in any row. NONE never sits on
// the plus side, so this only fails for rows where j is an admitted
// conclusion but NONE is not (strict mode).
struct ReducedModel {
  std::vector<std::size_t> col_var;            // column -> program variable
  std::vector<int> var_col;                    // variable -> column or -1
  std::vector<std::vector<int>> arc_cols;      // per arc, in label order
  struct Row {
    std::size_t source;  // index into program.triangle_rows
    std::vector<std::pair<int, double>> terms;
  };
  std::vector<Row> rows;
};

ReducedModel reduce(const BinaryProgram& program) {
  const std::size_t n_arcs = program.num_arcs();
  std::vector<RelSet> strict_conclusions(n_arcs);
  for (const auto& row : program.triangle_rows)
    if (!row.none_relaxes) strict_conclusions[row.minus_arc] |= row.conclusions;

  ReducedModel m;
  m.var_col.assign(program.num_vars(), -1);
  m.arc_cols.resize(n_arcs);
  for (std::size_t i = 0; i < n_arcs; ++i) {
    const double none_w = program.weight(i, RelType::None);
    const bool none_open =
        !program.is_forbidden(BinaryProgram::var_index(i, RelType::None));
    for (RelType r : all_labels()) {
      if (program.is_forbidden(BinaryProgram::var_index(i, r))) continue;
      const bool dominated = none_open && r != RelType::None &&
                             program.weight(i, r) <= none_w &&
                             !strict_conclusions[i].contains(r);
      if (dominated) continue;
      const std::size_t v = BinaryProgram::var_index(i, r);
      m.var_col[v] = static_cast<int>(m.col_var.size());
      m.col_var.push_back(v);
      m.arc_cols[i].push_back(m.var_col[v]);
    }
  }

  for (std::size_t k = 0; k < program.triangle_rows.size(); ++k) {
    const TriangleRow& row = program.triangle_rows[k];
    const int c1 = m.var_col[row.plus1], c2 = m.var_col[row.plus2];
    // A dropped plus variable is fixed at zero and the row is slack.
    if (c1 < 0 || c2 < 0) continue;
    ReducedModel::Row out;
    out.source = k;
    out.terms = {{c1, 1.0}, {c2, 1.0}};
    for (std::size_t v : program.minus_vars(row))
      if (m.var_col[v] >= 0) out.terms.emplace_back(m.var_col[v], -1.0);
    m.rows.push_back(std::move(out));
  }
  return m;
}

class BranchAndBound {
 public:
  using Clock = std::chrono::steady_clock;

  BranchAndBound(const BinaryProgram& program, const SolveOptions& options)
      : program_(program),
        options_(options),
        model_(reduce(program)),
        lp_(costs()),
        start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(options.time_limit))),
        in_lp_(model_.rows.size(), false) {
    for (std::size_t i = 0; i < program_.num_arcs(); ++i) {
      std::vector<std::pair<int, double>> terms;
      for (int c : model_.arc_cols[i]) terms.emplace_back(c, 1.0);
      lp_.add_row(terms, 1.0, true);
    }
  }

  Solution run();

 private:
  struct Node {
    std::vector<std::pair<int, bool>> fixings;
    double bound;
    std::int64_t parent;
  };

  std::vector<double> costs() const {
    std::vector<double> c;
    c.reserve(model_.col_var.size());
    for (std::size_t v : model_.col_var) c.push_back(-program_.objective[v]);
    return c;
  }

  bool timed_out() const { return Clock::now() > deadline_; }

  // Re-solves the LP and activates violated triangle rows until none are
  // left. Returns the bound, or nullopt if the node is infeasible or was
  // interrupted (interrupted_ tells the two apart).
  std::optional<double> solve_node();
  std::vector<RelType> labels_from_lp() const;
  void consider(std::vector<RelType> labels);
  std::optional<std::vector<RelType>> round_and_repair() const;
  int branching_column() const;

  const BinaryProgram& program_;
  SolveOptions options_;
  ReducedModel model_;
  detail::BoundedDualSimplex lp_;
  Clock::time_point start_, deadline_;
  std::vector<bool> in_lp_;
  bool interrupted_ = false;

  std::optional<std::vector<RelType>> incumbent_;
  double incumbent_value_ = -std::numeric_limits<double>::infinity();
};

std::optional<double> BranchAndBound::solve_node() {
  constexpr std::size_t kMaxRowsPerRound = 400;
  while (true) {
    const auto status = lp_.solve(deadline_);
    if (status == detail::BoundedDualSimplex::Status::Interrupted) {
      interrupted_ = true;
      return std::nullopt;
    }
    if (status == detail::BoundedDualSimplex::Status::Infeasible)
      return std::nullopt;
    const double bound = -lp_.objective();
    if (incumbent_ && bound <= incumbent_value_ + kObjectiveTol) return bound;

    std::vector<std::pair<double, std::size_t>> violated;
    for (std::size_t k = 0; k < model_.rows.size(); ++k) {
      if (in_lp_[k]) continue;
      double activity = 0.0;
      for (const auto& [c, a] : model_.rows[k].terms) activity += a * lp_.value(c);
      if (activity > 1.0 + kPrimalFeasTol) violated.emplace_back(activity, k);
    }
    if (violated.empty()) return bound;
    if (violated.size() > kMaxRowsPerRound) {
      std::partial_sort(violated.begin(), violated.begin() + kMaxRowsPerRound,
                        violated.end(), [](const auto& a, const auto& b) {
                          return a.first != b.first ? a.first > b.first
                                                    : a.second < b.second;
                        });
      violated.resize(kMaxRowsPerRound);
    }
    std::sort(violated.begin(), violated.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [activity, k] : violated) {
      lp_.add_row(model_.rows[k].terms, 1.0, false);
      in_lp_[k] = true;
    }
  }
}

std::vector<RelType> BranchAndBound::labels_from_lp() const {
  std::vector<RelType> labels(program_.num_arcs(), RelType::None);
  for (std::size_t i = 0; i < program_.num_arcs(); ++i) {
    double best = -1.0;
    for (int c : model_.arc_cols[i]) {
      if (lp_.value(c) > best + kIntegralityTol) {
        best = lp_.value(c);
        labels[i] = BinaryProgram::label_of(model_.col_var[c]);
      }
    }
  }
  return labels;
}

void BranchAndBound::consider(std::vector<RelType> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (program_.is_forbidden(BinaryProgram::var_index(i, labels[i]))) return;
  for (const auto& row : program_.triangle_rows)
    if (!row_holds(row, labels)) return;
  const double value = assignment_objective(program_, labels);
  if (!incumbent_ || value > incumbent_value_) {
    incumbent_ = std::move(labels);
    incumbent_value_ = value;
  }
}

// Rounds the LP point to its largest label per arc, then repeatedly moves
// the concluding arc of a violated row to its heaviest admitted label.
std::optional<std::vector<RelType>> BranchAndBound::round_and_repair() const {
  std::vector<RelType> labels = labels_from_lp();
  for (int pass = 0; pass < 50; ++pass) {
    bool clean = true;
    for (const auto& row : program_.triangle_rows) {
      if (row_holds(row, labels)) continue;
      clean = false;
      std::optional<RelType> fix;
      double fix_w = -std::numeric_limits<double>::infinity();
      for (int c : model_.arc_cols[row.minus_arc]) {
        const RelType r = BinaryProgram::label_of(model_.col_var[c]);
        const bool admitted =
            r == RelType::None ? row.none_relaxes : row.conclusions.contains(r);
        if (!admitted) continue;
        const double w = program_.weight(row.minus_arc, r);
        if (w > fix_w) {
          fix_w = w;
          fix = r;
        }
      }
      if (!fix) return std::nullopt;
      labels[row.minus_arc] = *fix;
    }
    if (clean) return labels;
  }
  return std::nullopt;
}

int BranchAndBound::branching_column() const {
  int best = -1;
  double best_frac = kIntegralityTol;
  for (int c = 0; c < lp_.num_structural(); ++c) {
    const double v = lp_.value(c);
    const double frac = std::min(v, 1.0 - v);
    if (frac > best_frac + 1e-12) {
      best_frac = frac;
      best = c;
    }
  }
  return best;
}

Solution BranchAndBound::run() {
  SolverStats stats;
  stats.rows = static_cast<std::int64_t>(program_.num_rows());
  stats.cols = static_cast<std::int64_t>(program_.num_vars());
  stats.active_cols = lp_.num_structural();

  if (program_.num_arcs() == 0) {
    Solution s = make_solution(program_, {}, SolveStatus::Optimal);
    s.stats = stats;
    return s;
  }

  // The all-NONE assignment is feasible unless NONE breaks triangles or is
  // forbidden.
  consider(std::vector<RelType>(program_.num_arcs(), RelType::None));

  std::vector<Node> stack;
  stack.push_back({{}, std::numeric_limits<double>::infinity(), -1});
  std::vector<std::pair<int, bool>> applied;
  std::int64_t next_id = 0;

  while (!stack.empty()) {
    if (timed_out()) {
      interrupted_ = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (incumbent_ && node.bound <= incumbent_value_ + kObjectiveTol) continue;

    for (const auto& [c, up] : applied) lp_.set_bounds(c, 0.0, 1.0);
    for (const auto& [c, up] : node.fixings)
      lp_.set_bounds(c, up ? 1.0 : 0.0, up ? 1.0 : 0.0);
    applied = node.fixings;

    const std::int64_t id = next_id++;
    ++stats.nodes_explored;
    NodeRecord record{id, node.parent, 0.0, false, false};

    const auto bound = solve_node();
    if (interrupted_) break;
    if (!bound) {
      record.infeasible = true;
      if (options_.record_nodes) stats.node_log.push_back(record);
      continue;
    }
    record.lp_bound = *bound;

    const int branch_col = branching_column();
    record.integral = branch_col < 0;
    if (options_.record_nodes) stats.node_log.push_back(record);

    if (incumbent_ && *bound <= incumbent_value_ + kObjectiveTol) continue;
    if (branch_col < 0) {
      consider(labels_from_lp());
      continue;
    }
    if (id == 0 || id % 64 == 0)
      if (auto repaired = round_and_repair()) consider(std::move(*repaired));

    Node down{node.fixings, *bound, id};
    down.fixings.emplace_back(branch_col, false);
    Node up{std::move(node.fixings), *bound, id};
    up.fixings.emplace_back(branch_col, true);
    stack.push_back(std::move(down));
    stack.push_back(std::move(up));
  }

  stats.lp_iterations = lp_.iterations();
  stats.active_rows = lp_.num_rows();
  stats.wall_time =
      std::chrono::duration<double>(Clock::now() - start_).count();

  Solution s;
  if (incumbent_) {
    s = make_solution(program_, *incumbent_,
                      interrupted_ ? SolveStatus::TimeLimit : SolveStatus::Optimal);
  } else {
    s.status =
        interrupted_ ? SolveStatus::NoSolutionFound : SolveStatus::Infeasible;
  }
  s.stats = std::move(stats);
  return s;
}

}  // namespace

Solution solve(const BinaryProgram& program, const SolveOptions& options) {
  if (!(options.time_limit > 0.0))
    throw std::invalid_argument("time limit must be positive");
  BranchAndBound bnb(program, options);
  return bnb.run();
}

Solution brute_force_solve(const BinaryProgram& program) {
  const std::size_t n = program.num_arcs();
  if (n > kBruteForceMaxArcs)
    throw SizeLimitError("brute force is limited to " +
                         std::to_string(kBruteForceMaxArcs) + " arcs, got " +
                         std::to_string(n));
  const auto start = std::chrono::steady_clock::now();

  // Rows are checked once all three of their arcs carry a label.
  std::vector<std::vector<const TriangleRow*>> rows_at(n);
  for (const auto& row : program.triangle_rows) {
    const std::size_t last =
        std::max({BinaryProgram::arc_of(row.plus1),
                  BinaryProgram::arc_of(row.plus2), row.minus_arc});
    rows_at[last].push_back(&row);
  }
  // best_rest[i] = sum of the largest weights of arcs i..n-1.
  std::vector<double> best_rest(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double m = -std::numeric_limits<double>::infinity();
    for (RelType r : all_labels()) m = std::max(m, program.weight(i, r));
    best_rest[i] = best_rest[i + 1] + m;
  }

  std::vector<RelType> labels(n, RelType::None);
  std::optional<std::vector<RelType>> best;
  double best_value = 0.0;
  std::int64_t visited = 0;

  auto search = [&](auto&& self, std::size_t i, double value) -> void {
    ++visited;
    if (i == n) {
      if (!best || value > best_value) {
        best = labels;
        best_value = value;
      }
      return;
    }
    // Later completions are lexicographically larger, so a tie cannot win.
    if (best && value + best_rest[i] <= best_value) return;
    for (RelType r : all_labels()) {
      if (program.is_forbidden(BinaryProgram::var_index(i, r))) continue;
      labels[i] = r;
      bool ok = true;
      for (const TriangleRow* row : rows_at[i])
        if (!row_holds(*row, labels)) {
          ok = false;
          break;
        }
      if (ok) self(self, i + 1, value + program.weight(i, r));
    }
    labels[i] = RelType::None;
  };
  search(search, 0, 0.0);

  Solution s;
  if (best)
    s = make_solution(program, std::move(*best), SolveStatus::Optimal);
  else
    s.status = SolveStatus::Infeasible;
  s.stats.nodes_explored = visited;
  s.stats.rows = static_cast<std::int64_t>(program.num_rows());
  s.stats.cols = static_cast<std::int64_t>(program.num_vars());
  s.stats.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return s;
}

VerifyResult verify(const BinaryProgram& program, const Solution& solution) {
  VerifyResult result;
  auto fail = [&](std::string msg) {
    result.ok = false;
    result.diagnostics.push_back(std::move(msg));
  };
  if (solution.values.size() != program.num_vars()) {
    fail("expected " + std::to_string(program.num_vars()) + " values, got " +
         std::to_string(solution.values.size()));
    return result;
  }
  double objective = 0.0;
  for (std::size_t v = 0; v < program.num_vars(); ++v) {
    if (solution.values[v] > 1) fail(BinaryProgram::var_name(v) + " is not binary");
    if (solution.values[v] && program.is_forbidden(v))
      fail(BinaryProgram::var_name(v) + " is fixed at 0");
    objective += program.objective[v] * solution.values[v];
  }
  for (std::size_t i = 0; i < program.num_arcs(); ++i) {
    int sum = 0;
    for (RelType r : all_labels())
      sum += solution.values[BinaryProgram::var_index(i, r)];
    if (sum != 1)
      fail("row p" + std::to_string(i) + " violated: " + std::to_string(sum) +
           " labels on arc " + std::to_string(i));
  }
  for (const auto& row : program.triangle_rows) {
    int activity = solution.values[row.plus1] + solution.values[row.plus2];
    for (std::size_t v : program.minus_vars(row)) activity -= solution.values[v];
    if (activity > 1)
      fail("row t" + std::to_string(row.triangle) + "_" +
           std::to_string(ordinal(row.a)) + "_" + std::to_string(ordinal(row.b)) +
           " violated: activity " + std::to_string(activity));
  }
  if (std::abs(objective - solution.objective_value) > kObjectiveTol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "objective mismatch: reported " << solution.objective_value
        << ", recomputed " << objective;
    fail(msg.str());
  }
  return result;
}

Solution read_solution_file(const BinaryProgram& program, std::istream& in) {
  std::map<std::string, std::size_t> by_name;
  for (std::size_t v = 0; v < program.num_vars(); ++v)
    by_name.emplace(BinaryProgram::var_name(v), v);

  Solution s;
  s.status = SolveStatus::TimeLimit;
  s.values.assign(program.num_vars(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string name, value;
    if (!(fields >> name)) continue;
    if (!(fields >> value) || (value != "0" && value != "1"))
      throw DataError("solution line " + std::to_string(lineno) +
                      ": expected '<var> <0|1>'");
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw DataError("solution line " + std::to_string(lineno) +
                      ": unknown variable " + name);
    s.values[it->second] = value == "1" ? 1 : 0;
  }
  s.assignment.assign(program.num_arcs(), RelType::None);
  for (std::size_t i = 0; i < program.num_arcs(); ++i)
    for (RelType r : all_labels())
      if (s.values[BinaryProgram::var_index(i, r)]) {
        s.assignment[i] = r;
        break;
      }
  for (std::size_t v = 0; v < program.num_vars(); ++v)
    s.objective_value += program.objective[v] * s.values[v];
  return s;
}

}  // namespace tempens
