#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tempens/ingest.hpp"
#include "tempens/relation_algebra.hpp"

namespace tempens {

struct ModelOptions {
  // When false (the default) labelling pr as NONE satisfies every triangle
  // row, so the all-NONE assignment is always feasible.
  bool none_breaks_triangles = false;
  // Weight placed on the NONE column of every arc.
  double none_weight = 0.0;
  // When true an arc may only take a label some member voted for; NONE and
  // unvoted labels are fixed at zero.
  bool voted_labels_only = false;
};

// Per-document vote aggregation. arcs is the index set A; alpha[i][j - 1]
// is the summed weight of classifiers predicting label j on arc i.
struct VoteTable {
  std::string document;
  std::vector<CanonicalArc> arcs;
  std::vector<std::array<double, kNumLabels>> alpha;

  double weight(std::size_t arc, RelType r) const {
    return alpha[arc][ordinal(r) - 1];
  }
};

VoteTable collect_arcs(std::span<const ClassifierRun> runs,
                       const std::string& document,
                       const ModelOptions& options = {});

// A node triple {p, q, r} whose three pairwise arcs are all in A, read as
// p -> q -> r with conclusion p -> r. A *_forward flag is false when the
// stored arc points the other way.
struct Triangle {
  std::size_t pq = 0, qr = 0, pr = 0;
  bool pq_forward = true, qr_forward = true, pr_forward = true;
};

std::vector<Triangle> enumerate_triangles(std::span<const CanonicalArc> arcs);

// x_{pq,a} + x_{qr,b} - sum_{c in conclusions} x_{pr,c}
//   [- x_{pr,NONE} when none_relaxes] <= 1
// Labels a, b and the conclusions are in the stored direction of each arc.
struct TriangleRow {
  std::size_t triangle = 0;
  RelType a = RelType::None;
  RelType b = RelType::None;
  std::size_t plus1 = 0;  // variable index of x_{pq,a}
  std::size_t plus2 = 0;  // variable index of x_{qr,b}
  std::size_t minus_arc = 0;
  RelSet conclusions;
  bool none_relaxes = true;
};

// The weighted-assignment integer program. Variable x_{i,j} has index
// 15 * i + (j - 1). Partition rows (sum_j x_{i,j} = 1) are implied by the
// arc count and not stored.
struct BinaryProgram {
  std::string document;
  std::vector<CanonicalArc> arcs;
  std::vector<double> objective;  // maximised
  std::vector<Triangle> triangles;
  std::vector<TriangleRow> triangle_rows;
  ModelOptions options;
  // Variables fixed at zero, ascending.
  std::vector<std::size_t> forbidden;

  std::size_t num_arcs() const { return arcs.size(); }
  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return arcs.size() + triangle_rows.size(); }

  static std::size_t var_index(std::size_t arc, RelType r) {
    return kNumLabels * arc + static_cast<std::size_t>(ordinal(r) - 1);
  }
  static std::size_t arc_of(std::size_t var) { return var / kNumLabels; }
  static RelType label_of(std::size_t var) {
    return static_cast<RelType>(var % kNumLabels + 1);
  }
  // "x_<arc>_<ordinal>"
  static std::string var_name(std::size_t var);
  double weight(std::size_t arc, RelType r) const {
    return objective[var_index(arc, r)];
  }
  bool is_forbidden(std::size_t var) const;
  // Variables of the row, minus side only.
  std::vector<std::size_t> minus_vars(const TriangleRow& row) const;
};

BinaryProgram build_ip(const VoteTable& votes,
                       std::span<const Triangle> triangles,
                       const CompositionTable& table,
                       const ModelOptions& options = {});

// Convenience: enumerate_triangles + build_ip.
BinaryProgram build_ip(const VoteTable& votes,
                       const ModelOptions& options = {});

// CPLEX LP text: Maximize / Subject To / Binaries / End. Partition rows are
// named p<arc>, triangle rows t<triangle>_<a>_<b>, and forbidden variables
// share one row "fixed" summing to zero. Coefficients are written
// with six decimals; zero objective terms are omitted.
void export_lp(const BinaryProgram& program, std::ostream& sink);

}  // namespace tempens
