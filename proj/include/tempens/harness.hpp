#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tempens/ensemble_model.hpp"
#include "tempens/evaluation.hpp"
#include "tempens/ingest.hpp"
#include "tempens/ip_solver.hpp"

namespace tempens {

enum class WeightsSource { FullPlatinum, S1, File };

struct EnsembleSpec {
  std::set<std::string> members;
  WeightsSource weights_source = WeightsSource::File;
  std::string label;  // display label; members joined by ", " when empty

  std::string display_label() const;
};

// One ensemble per line: "[label:] name name ..." where names are separated
// by whitespace or commas; '#' starts a comment.
std::vector<EnsembleSpec> parse_ensembles(std::istream& in);

// All supersets of base.members inside pool, by size then lexicographically.
// Throws ConfigError if base is not contained in pool.
std::vector<EnsembleSpec> enumerate_ensembles(const EnsembleSpec& base,
                                              const std::set<std::string>& pool);

struct Split {
  std::vector<std::string> s1;
  std::vector<std::string> s2;
};

// Lexicographic document order, first half to S1.
Split default_split(std::vector<std::string> doc_ids);
// "S1 <doc>" / "S2 <doc>" lines. Throws ConfigError on overlap.
Split parse_split(std::istream& in);

struct ExperimentConfig {
  std::filesystem::path corpus_root;
  std::optional<Split> split;
  double time_limit = 300.0;
  ModelOptions model;
  ScoringOptions scoring;
  std::filesystem::path output_dir;
};

struct DocumentSolve {
  std::string document;
  std::size_t arcs = 0;
  std::size_t num_vars = 0;
  std::size_t rows = 0;
  SolveStatus status = SolveStatus::NoSolutionFound;
  double objective = 0.0;
  double seconds = 0.0;
  bool consistent = false;  // verify() and is_consistent_labeling both hold
};

struct Reconciliation {
  ClassifierRun run;  // the reconciled labelling, NONE arcs dropped
  std::vector<DocumentSolve> documents;
};

// Builds, solves and decodes the program of every listed document.
Reconciliation reconcile(const std::vector<ClassifierRun>& members,
                         const std::vector<std::string>& documents,
                         const ModelOptions& model, double time_limit,
                         const std::string& name = "ensemble");

// Collects the member runs of an ensemble, optionally overriding weights.
std::vector<ClassifierRun> select_members(
    const Corpus& corpus, const EnsembleSpec& spec,
    const std::map<std::string, double>* weights = nullptr);

struct EnsembleResult {
  EnsembleSpec spec;
  ScoreReport report;
  std::map<std::string, double> weights;
  std::vector<DocumentSolve> solves;
};

// Weights as loaded; reconcile and score on every reference document.
std::vector<EnsembleResult> run_procedure_one(
    const ExperimentConfig& config, const Corpus& corpus,
    const std::vector<EnsembleSpec>& ensembles);

// Weights = each member's F1 on S1; reconcile and score on S2 only.
std::vector<EnsembleResult> run_procedure_two(
    const ExperimentConfig& config, const Corpus& corpus,
    const std::vector<EnsembleSpec>& ensembles);

void write_results_table(const std::vector<EnsembleResult>& results,
                         std::ostream& out);

// Writes <dir>/<doc>.tml for each document of the run.
void write_run(const ClassifierRun& run, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SyntheticClassifier {
  std::string name;
  double coverage = 0.7;      // chance a reference link is predicted
  double error_rate = 0.2;    // chance a predicted label is replaced
  double spurious_rate = 0.1; // extra links per reference link
};

struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t documents = 3;
  std::size_t events = 12;      // event instances per document
  std::size_t timexes = 2;      // besides the DCT
  std::size_t links = 20;       // reference links per document
  std::vector<SyntheticClassifier> classifiers;
};

std::vector<SyntheticClassifier> default_synthetic_classifiers();

// Samples intervals per document, labels a random subset of entity pairs
// with their true relations (pairs in Allen overlap are skipped), and
// derives noisy classifier runs. Classifier weights are their F1 against
// the reference.
Corpus generate_synthetic(const SyntheticSpec& spec);

// Writes reference/, runs/<name>/ and weights.txt under root.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

// A single document whose union arc set has exactly `arcs` arcs, built from
// `classifiers` noisy runs over a dense local neighbourhood structure.
Corpus generate_large_document(std::uint64_t seed, std::size_t arcs,
                               std::size_t classifiers);

}  // namespace tempens
