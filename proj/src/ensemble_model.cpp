#include "tempens/ensemble_model.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace tempens {

VoteTable collect_arcs(std::span<const ClassifierRun> runs,
                       const std::string& document,
                       const ModelOptions& options) {
  // Per run, the last prediction on each arc wins.
  std::map<CanonicalArc, std::vector<std::pair<double, RelType>>> votes;
  for (const ClassifierRun& run : runs) {
    auto doc = run.documents.find(document);
    if (doc == run.documents.end()) continue;
    std::map<CanonicalArc, RelType> predicted;
    for (const TLink& link : doc->second) {
      if (link.rel == RelType::None || link.source == link.target) continue;
      auto [arc, rel] = canonicalize(link);
      predicted[arc] = rel;
    }
    for (const auto& [arc, rel] : predicted)
      votes[arc].emplace_back(run.f1_weight, rel);
  }

  VoteTable table;
  table.document = document;
  table.arcs.reserve(votes.size());
  table.alpha.reserve(votes.size());
  for (const auto& [arc, ballots] : votes) {
    std::array<double, kNumLabels> row{};
    row[ordinal(RelType::None) - 1] = options.none_weight;
    for (const auto& [weight, rel] : ballots) row[ordinal(rel) - 1] += weight;
    table.arcs.push_back(arc);
    table.alpha.push_back(row);
  }
  return table;
}

std::vector<Triangle> enumerate_triangles(std::span<const CanonicalArc> arcs) {
  std::map<EntityRef, std::size_t> node_index;
  for (const auto& arc : arcs) {
    node_index.emplace(arc.lo, 0);
    node_index.emplace(arc.hi, 0);
  }
  std::size_t next = 0;
  for (auto& [node, idx] : node_index) idx = next++;

  // succ[u] maps v > u to the arc index joining them.
  std::vector<std::map<std::size_t, std::size_t>> succ(node_index.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    std::size_t u = node_index.at(arcs[i].lo), v = node_index.at(arcs[i].hi);
    if (v < u) std::swap(u, v);
    succ[u].emplace(v, i);
  }

  std::vector<Triangle> out;
  for (std::size_t u = 0; u < succ.size(); ++u) {
    for (const auto& [v, uv] : succ[u]) {
      for (auto it = succ[u].upper_bound(v); it != succ[u].end(); ++it) {
        const std::size_t w = it->first;
        auto vw = succ[v].find(w);
        if (vw == succ[v].end()) continue;
        Triangle t;
        t.pq = uv;
        t.qr = vw->second;
        t.pr = it->second;
        // Node numbering follows the entity order, so stored arcs run from
        // the lower to the higher node.
        t.pq_forward = arcs[uv].lo < arcs[uv].hi;
        t.qr_forward = arcs[t.qr].lo < arcs[t.qr].hi;
        t.pr_forward = arcs[t.pr].lo < arcs[t.pr].hi;
        out.push_back(t);
      }
    }
  }
  return out;
}

std::string BinaryProgram::var_name(std::size_t var) {
  return "x_" + std::to_string(arc_of(var)) + "_" +
         std::to_string(ordinal(label_of(var)));
}

bool BinaryProgram::is_forbidden(std::size_t var) const {
  return std::binary_search(forbidden.begin(), forbidden.end(), var);
}

std::vector<std::size_t> BinaryProgram::minus_vars(const TriangleRow& row) const {
  std::vector<std::size_t> out;
  for (RelType c : row.conclusions.members())
    out.push_back(var_index(row.minus_arc, c));
  if (row.none_relaxes) out.push_back(var_index(row.minus_arc, RelType::None));
  return out;
}

BinaryProgram build_ip(const VoteTable& votes,
                       std::span<const Triangle> triangles,
                       const CompositionTable& table,
                       const ModelOptions& options) {
  BinaryProgram program;
  program.document = votes.document;
  program.arcs = votes.arcs;
  program.options = options;
  program.objective.reserve(votes.arcs.size() * kNumLabels);
  for (const auto& row : votes.alpha)
    program.objective.insert(program.objective.end(), row.begin(), row.end());
  program.triangles.assign(triangles.begin(), triangles.end());
  if (options.voted_labels_only) {
    for (std::size_t i = 0; i < votes.arcs.size(); ++i)
      for (RelType r : all_labels())
        if (r == RelType::None || votes.weight(i, r) <= 0.0)
          program.forbidden.push_back(BinaryProgram::var_index(i, r));
  }

  for (std::size_t k = 0; k < triangles.size(); ++k) {
    const Triangle& t = triangles[k];
    for (RelType a : proper_labels()) {
      const RelType along_pq = t.pq_forward ? a : invert(a);
      for (RelType b : proper_labels()) {
        const RelType along_qr = t.qr_forward ? b : invert(b);
        RelSet allowed = table.compose(along_pq, along_qr).saturated();
        if (!t.pr_forward) allowed = allowed.inverted();
        // Every label fits: the row can never bind.
        if (allowed.full()) continue;
        TriangleRow row;
        row.triangle = k;
        row.a = a;
        row.b = b;
        row.plus1 = BinaryProgram::var_index(t.pq, a);
        row.plus2 = BinaryProgram::var_index(t.qr, b);
        row.minus_arc = t.pr;
        row.conclusions = allowed;
        row.none_relaxes = !options.none_breaks_triangles;
        program.triangle_rows.push_back(row);
      }
    }
  }
  return program;
}

BinaryProgram build_ip(const VoteTable& votes, const ModelOptions& options) {
  const auto triangles = enumerate_triangles(votes.arcs);
  return build_ip(votes, triangles, CompositionTable::instance(), options);
}

namespace {

std::string coef(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void export_lp(const BinaryProgram& program, std::ostream& sink) {
  std::string out;
  out.reserve(64 * program.num_vars() + 48 * program.triangle_rows.size());
  out += "\\ document ";
  out += program.document;
  out += "\nMaximize\n obj:";
  for (std::size_t v = 0; v < program.num_vars(); ++v) {
    const double w = program.objective[v];
    if (w == 0.0) continue;
    out += w < 0 ? " - " : " + ";
    out += coef(w < 0 ? -w : w);
    out += ' ';
    out += BinaryProgram::var_name(v);
  }
  out += "\nSubject To\n";
  for (std::size_t i = 0; i < program.num_arcs(); ++i) {
    out += " p" + std::to_string(i) + ":";
    for (RelType r : all_labels()) {
      out += r == RelType::Before ? " " : " + ";
      out += BinaryProgram::var_name(BinaryProgram::var_index(i, r));
    }
    out += " = 1\n";
  }
  for (const TriangleRow& row : program.triangle_rows) {
    out += " t" + std::to_string(row.triangle) + "_" +
           std::to_string(ordinal(row.a)) + "_" +
           std::to_string(ordinal(row.b)) + ": ";
    out += BinaryProgram::var_name(row.plus1);
    out += " + ";
    out += BinaryProgram::var_name(row.plus2);
    for (std::size_t v : program.minus_vars(row)) {
      out += " - ";
      out += BinaryProgram::var_name(v);
    }
    out += " <= 1\n";
  }
  if (!program.forbidden.empty()) {
    out += " fixed:";
    for (std::size_t k = 0; k < program.forbidden.size(); ++k) {
      out += k == 0 ? " " : " + ";
      out += BinaryProgram::var_name(program.forbidden[k]);
    }
    out += " = 0\n";
  }
  out += "Binaries\n";
  for (std::size_t v = 0; v < program.num_vars(); ++v) {
    out += ' ';
    out += BinaryProgram::var_name(v);
    out += '\n';
  }
  out += "End\n";
  sink << out;
  if (!sink) throw std::ios_base::failure("failed writing LP output");
}

}  // namespace tempens
