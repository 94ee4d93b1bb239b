#include "tempens/evaluation.hpp"

#include <algorithm>
#include <cstdio>

namespace tempens {

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

EventGraph graph_from_links(const std::vector<TLink>& links,
                            const std::vector<EntityRef>& entities) {
  EventGraph g;
  for (const auto& e : entities) g.add_node(e);
  for (const auto& link : links) {
    if (link.rel == RelType::None || link.source == link.target) continue;
    g.set_relation(link.source, link.target, link.rel);
  }
  return g;
}

namespace {

bool verified(const EntityRef& p, const EntityRef& q, RelSet label,
              const EventGraph& evidence, const EventGraph& raw_other,
              const ScoringOptions& options) {
  if (!label.is_singleton()) return false;
  const RelType r = label.first();
  const auto set = evidence.relation(p, q);
  if (!set || set->empty()) return false;
  if (set->collapsed() != RelSet::of(collapse_synonyms(r))) return false;
  if (!options.collapse_identity &&
      (r == RelType::Simultaneous || r == RelType::Identity)) {
    const auto explicit_edge = raw_other.relation(p, q);
    if (explicit_edge && explicit_edge->is_singleton() &&
        (explicit_edge->first() == RelType::Simultaneous ||
         explicit_edge->first() == RelType::Identity) &&
        explicit_edge->first() != r)
      return false;
  }
  return true;
}

std::size_t count_verified(const EventGraph& claims, const EventGraph& evidence,
                           const EventGraph& raw_other,
                           const ScoringOptions& options) {
  std::size_t n = 0;
  for (const auto& [key, set] : claims.edges())
    if (verified(key.first, key.second, set, evidence, raw_other, options)) ++n;
  return n;
}

}  // namespace

AwarenessResult temporal_awareness(const EventGraph& reference,
                                   const EventGraph& system,
                                   const ScoringOptions& options) {
  AwarenessResult out;
  auto ref_closed = closure(reference);
  auto sys_closed = closure(system);
  out.reference_inconsistent = !ref_closed.has_value();
  out.system_inconsistent = !sys_closed.has_value();
  const EventGraph& ref_evidence = ref_closed ? *ref_closed : reference;
  const EventGraph& sys_evidence = sys_closed ? *sys_closed : system;

  out.counts.total_sys = system.edge_count();
  out.counts.total_ref = reference.edge_count();
  out.counts.verified_sys =
      count_verified(system, ref_evidence, reference, options);
  out.counts.verified_ref =
      count_verified(reference, sys_evidence, system, options);
  out.precision = out.counts.total_sys
                      ? double(out.counts.verified_sys) / out.counts.total_sys
                      : 0.0;
  out.recall = out.counts.total_ref
                   ? double(out.counts.verified_ref) / out.counts.total_ref
                   : 0.0;
  return out;
}

ScoreReport score_run(const ClassifierRun& reference,
                      const ClassifierRun& system,
                      const std::set<std::string>& doc_filter,
                      const ScoringOptions& options) {
  std::vector<std::string> docs;
  if (doc_filter.empty()) {
    for (const auto& [id, links] : reference.documents) docs.push_back(id);
  } else {
    for (const auto& id : doc_filter) {
      if (!reference.documents.count(id))
        throw ConfigError("document " + id + " is not in the reference");
      docs.push_back(id);
    }
  }

  ScoreReport report;
  double sum_p = 0.0, sum_r = 0.0;
  static const std::vector<TLink> kNoLinks;
  for (const auto& id : docs) {
    const EventGraph ref = graph_from_links(reference.documents.at(id));
    auto sys_it = system.documents.find(id);
    const EventGraph sys = graph_from_links(
        sys_it == system.documents.end() ? kNoLinks : sys_it->second);
    const AwarenessResult r = temporal_awareness(ref, sys, options);

    DocumentScore d;
    d.precision = r.precision;
    d.recall = r.recall;
    d.f1 = f1_score(r.precision, r.recall);
    d.counts = r.counts;
    d.reference_inconsistent = r.reference_inconsistent;
    d.system_inconsistent = r.system_inconsistent;
    report.per_document.emplace(id, d);

    report.totals.verified_sys += r.counts.verified_sys;
    report.totals.total_sys += r.counts.total_sys;
    report.totals.verified_ref += r.counts.verified_ref;
    report.totals.total_ref += r.counts.total_ref;
    sum_p += r.precision;
    sum_r += r.recall;
  }

  if (options.macro_average) {
    report.precision = docs.empty() ? 0.0 : sum_p / docs.size();
    report.recall = docs.empty() ? 0.0 : sum_r / docs.size();
  } else {
    const auto& t = report.totals;
    report.precision = t.total_sys ? double(t.verified_sys) / t.total_sys : 0.0;
    report.recall = t.total_ref ? double(t.verified_ref) / t.total_ref : 0.0;
  }
  report.f1 = f1_score(report.precision, report.recall);
  return report;
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_csv_row(std::ostream& out, const std::string& id, double p, double r,
                   double f1, const AwarenessCounts& c) {
  out << id << ',' << fixed6(p) << ',' << fixed6(r) << ',' << fixed6(f1) << ','
      << c.verified_sys << ',' << c.total_sys << ',' << c.verified_ref << ','
      << c.total_ref << '\n';
}

}  // namespace

void write_score_csv(const ScoreReport& report, std::ostream& out) {
  out << "doc_id,precision,recall,f1,verified_sys,total_sys,verified_ref,"
         "total_ref\n";
  for (const auto& [id, d] : report.per_document)
    write_csv_row(out, id, d.precision, d.recall, d.f1, d.counts);
  write_csv_row(out, "ALL", report.precision, report.recall, report.f1,
                report.totals);
}

void write_score_table(const std::vector<ScoreTableRow>& rows,
                       std::ostream& out) {
  const bool with_names = std::any_of(rows.begin(), rows.end(),
                                      [](const auto& r) { return !r.name.empty(); });
  std::size_t id_w = 3, name_w = 10;
  for (const auto& r : rows) {
    id_w = std::max(id_w, r.id.size());
    name_w = std::max(name_w, r.name.size());
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  out << pad("IDs", id_w) << "  ";
  if (with_names) out << pad("Classifier", name_w) << "  ";
  out << "F1      Precision  Recall\n";
  for (const auto& r : rows) {
    out << pad(r.id, id_w) << "  ";
    if (with_names) out << pad(r.name, name_w) << "  ";
    out << fixed4(r.f1) << "  " << fixed4(r.precision) << "     "
        << fixed4(r.recall) << '\n';
  }
}

}  // namespace tempens
