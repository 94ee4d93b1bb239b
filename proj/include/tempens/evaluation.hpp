#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tempens/ingest.hpp"
#include "tempens/relation_algebra.hpp"

namespace tempens {

struct ScoringOptions {
  // When true (the default) IDENTITY and SIMULTANEOUS count as the same
  // relation. When false an explicit edge on the other side must carry the
  // exact same one of the two.
  bool collapse_identity = true;
  // Corpus figures from summed counts (micro) or averaged per document.
  bool macro_average = false;
};

struct AwarenessCounts {
  std::size_t verified_sys = 0;
  std::size_t total_sys = 0;
  std::size_t verified_ref = 0;
  std::size_t total_ref = 0;
};

struct AwarenessResult {
  double precision = 0.0;
  double recall = 0.0;
  AwarenessCounts counts;
  bool reference_inconsistent = false;
  bool system_inconsistent = false;
};

double f1_score(double precision, double recall);

// Graph of the non-NONE links of one document; later links on the same pair
// replace earlier ones.
EventGraph graph_from_links(const std::vector<TLink>& links,
                            const std::vector<EntityRef>& entities = {});

// Closure-based temporal awareness. A relation r(p, q) of one graph is
// verified when the other graph's closure holds a non-empty set on (p, q)
// that collapses to {r}. A graph whose closure is inconsistent is used as is
// and flagged.
AwarenessResult temporal_awareness(const EventGraph& reference,
                                   const EventGraph& system,
                                   const ScoringOptions& options = {});

struct DocumentScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  AwarenessCounts counts;
  bool reference_inconsistent = false;
  bool system_inconsistent = false;
};

struct ScoreReport {
  std::map<std::string, DocumentScore> per_document;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  AwarenessCounts totals;
};

// Scores the documents in doc_filter (all reference documents when empty).
// Documents the system run lacks are scored against an empty graph. Throws
// ConfigError if the filter names a document outside the reference.
ScoreReport score_run(const ClassifierRun& reference,
                      const ClassifierRun& system,
                      const std::set<std::string>& doc_filter = {},
                      const ScoringOptions& options = {});

// doc_id,precision,recall,f1,verified_sys,total_sys,verified_ref,total_ref
// followed by one row per document and a final "ALL" row.
void write_score_csv(const ScoreReport& report, std::ostream& out);

struct ScoreTableRow {
  std::string id;
  std::string name;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// Aligned plain-text table with F1 / Precision / Recall columns at four
// decimals. The name column is omitted when every row leaves it empty.
void write_score_table(const std::vector<ScoreTableRow>& rows,
                       std::ostream& out);

}  // namespace tempens
