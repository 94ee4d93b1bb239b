#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempens/ensemble_model.hpp"

namespace tempens {

struct NodeRecord {
  std::int64_t id = 0;
  std::int64_t parent = -1;  // -1 for the root
  double lp_bound = 0.0;     // maximisation bound after row activation
  bool integral = false;
  bool infeasible = false;
};

struct SolverStats {
  std::int64_t nodes_explored = 0;
  std::int64_t lp_iterations = 0;
  double wall_time = 0.0;  // seconds
  std::int64_t rows = 0;   // rows of the full model
  std::int64_t cols = 0;   // columns of the full model
  std::int64_t active_rows = 0;
  std::int64_t active_cols = 0;
  std::vector<NodeRecord> node_log;  // filled when requested
};

enum class SolveStatus {
  Optimal,           // proven optimal
  TimeLimit,         // best incumbent returned, optimality not proven
  Infeasible,        // no assignment satisfies all rows
  NoSolutionFound,   // time limit hit before any incumbent was found
};

const char* to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::NoSolutionFound;
  // One label per arc; NONE is a regular label.
  std::vector<RelType> assignment;
  // x_{i,j} in variable order.
  std::vector<std::uint8_t> values;
  double objective_value = 0.0;
  bool proven_optimal = false;
  SolverStats stats;

  bool has_assignment() const {
    return status == SolveStatus::Optimal || status == SolveStatus::TimeLimit;
  }
};

struct SolveOptions {
  double time_limit = 300.0;  // seconds, must be positive
  bool record_nodes = false;
};

// Tolerances of the LP-based search.
inline constexpr double kPrimalFeasTol = 1e-7;
inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kObjectiveTol = 1e-9;

// Branch and bound over the LP relaxation; throws std::invalid_argument if
// time_limit <= 0.
Solution solve(const BinaryProgram& program, const SolveOptions& options = {});

class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kBruteForceMaxArcs = 8;

// Exhaustive search over per-arc labels; among equally good assignments the
// lexicographically smallest (arc order, then ordinal) wins. Throws
// SizeLimitError beyond kBruteForceMaxArcs arcs.
Solution brute_force_solve(const BinaryProgram& program);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> diagnostics;
  explicit operator bool() const { return ok; }
};

// Checks partition rows, triangle rows and the reported objective (within
// kObjectiveTol) on solution.values.
VerifyResult verify(const BinaryProgram& program, const Solution& solution);

// Objective of a full label assignment.
double assignment_objective(const BinaryProgram& program,
                            const std::vector<RelType>& assignment);

// Reads "<var_name> <0|1>" lines produced by an external solver; variables
// not listed are 0. Throws DataError on unknown names or bad values.
Solution read_solution_file(const BinaryProgram& program, std::istream& in);

}  // namespace tempens
