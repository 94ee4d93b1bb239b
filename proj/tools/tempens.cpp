// Command-line front end.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tempens/harness.hpp"

namespace fs = std::filesystem;
using namespace tempens;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct CorpusArgs {
  fs::path root;
  fs::path weights;
  std::vector<std::string> members;
};

void add_corpus_options(CLI::App* cmd, CorpusArgs& args) {
  cmd->add_option("--corpus", args.root, "Corpus root (reference/ and runs/)")
      ->required();
  cmd->add_option("--weights", args.weights,
                  "Weights file (default: <corpus>/weights.txt)");
  cmd->add_option("--members", args.members,
                  "Classifiers to combine (default: all runs)")
      ->delimiter(',');
}

void add_model_options(CLI::App* cmd, ModelOptions& model) {
  cmd->add_flag("--none-breaks-triangles", model.none_breaks_triangles,
                "Do not let NONE on the concluding arc satisfy a triangle row");
  cmd->add_option("--none-weight", model.none_weight, "Weight of the NONE label")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--voted-labels-only", model.voted_labels_only,
                "Restrict every arc to labels some member predicted");
}

void add_scoring_options(CLI::App* cmd, ScoringOptions& scoring) {
  cmd->add_flag("--macro", scoring.macro_average,
                "Average precision and recall over documents");
  cmd->add_flag_callback(
      "--no-collapse-identity", [&scoring] { scoring.collapse_identity = false; },
      "Score IDENTITY and SIMULTANEOUS as different relations");
}

Corpus open_corpus(const CorpusArgs& args) {
  if (!fs::is_directory(args.root))
    throw DataError("corpus directory " + args.root.string() + " does not exist");
  const fs::path weights_path =
      args.weights.empty() ? args.root / "weights.txt" : args.weights;
  Corpus corpus = load_corpus(args.root, load_weights(weights_path));
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << '\n';
  return corpus;
}

std::vector<ClassifierRun> pick_members(const Corpus& corpus,
                                        const std::vector<std::string>& names) {
  EnsembleSpec spec;
  if (names.empty())
    for (const auto& [name, run] : corpus.runs) spec.members.insert(name);
  else
    spec.members.insert(names.begin(), names.end());
  if (spec.members.empty()) throw ConfigError("the corpus has no classifier runs");
  return select_members(corpus, spec);
}

BinaryProgram program_for(const Corpus& corpus, const CorpusArgs& args,
                          const std::string& doc, const ModelOptions& model) {
  const auto members = pick_members(corpus, args.members);
  if (!corpus.reference.documents.count(doc)) {
    bool seen = false;
    for (const auto& m : members) seen = seen || m.documents.count(doc);
    if (!seen) throw DataError("no run contains document " + doc);
  }
  return build_ip(collect_arcs(members, doc, model), model);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

// Writes to `path`, or to stdout when it is empty.
template <typename F>
void emit(const fs::path& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out = open_output(path);
  write(out);
}

std::set<std::string> split_list(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

// Entries of a line-oriented key=value file, in file order.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

// Moves "--config FILE" out of the arguments and splices the file's
// entries in as --key=value right after the subcommand, so that explicit
// command-line values (parsed later) take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::set<std::string>& commands) {
  fs::path config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file");
      config = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config.empty()) return args;
  std::size_t pos = 0;
  while (pos < args.size() && !commands.count(args[pos])) ++pos;
  if (pos == args.size()) throw ConfigError("--config needs a command");
  std::vector<std::string> inserted;
  for (const auto& [key, value] : read_config(config))
    inserted.push_back("--" + key + "=" + value);
  args.insert(args.begin() + pos + 1, inserted.begin(), inserted.end());
  return args;
}

void print_solves(std::ostream& out, const std::vector<DocumentSolve>& solves) {
  out << "doc_id,arcs,num_vars,rows,status,objective,seconds,consistent\n";
  for (const auto& d : solves) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.3f", d.objective, d.seconds);
    out << d.document << ',' << d.arcs << ',' << d.num_vars << ',' << d.rows << ','
        << to_string(d.status) << ',' << buf << ',' << (d.consistent ? 1 : 0)
        << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Reconcile temporal-relation classifier outputs into one consistent labelling."};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "key=value file supplying options of the command");

  // reconcile
  CorpusArgs rec_corpus;
  ModelOptions rec_model;
  double rec_time_limit = 300.0;
  fs::path rec_out;
  std::string rec_name = "ensemble";
  auto* reconcile_cmd = app.add_subcommand(
      "reconcile", "Solve every document and write the reconciled TimeML");
  add_corpus_options(reconcile_cmd, rec_corpus);
  add_model_options(reconcile_cmd, rec_model);
  reconcile_cmd->add_option("--time-limit", rec_time_limit, "Seconds per document")
      ->check(CLI::PositiveNumber);
  reconcile_cmd->add_option("--out", rec_out, "Output directory")->required();
  reconcile_cmd->add_option("--name", rec_name, "Name of the reconciled run");

  // score
  fs::path score_system, score_reference, score_out;
  std::vector<std::string> score_docs;
  ScoringOptions score_opts;
  bool score_table = false;
  auto* score_cmd = app.add_subcommand("score", "Temporal-awareness scores as CSV");
  score_cmd->add_option("--system", score_system, "Directory of system .tml files")
      ->required();
  score_cmd->add_option("--reference", score_reference,
                        "Directory of reference .tml files")
      ->required();
  score_cmd->add_option("--docs", score_docs, "Only these documents")->delimiter(',');
  score_cmd->add_option("--out", score_out, "CSV file (default: stdout)");
  score_cmd->add_flag("--table", score_table, "Print the corpus scores as a table");
  add_scoring_options(score_cmd, score_opts);

  // export-lp
  CorpusArgs lp_corpus;
  ModelOptions lp_model;
  std::string lp_doc;
  fs::path lp_out;
  auto* lp_cmd = app.add_subcommand("export-lp", "Write one document's program as CPLEX LP");
  add_corpus_options(lp_cmd, lp_corpus);
  add_model_options(lp_cmd, lp_model);
  lp_cmd->add_option("--doc", lp_doc, "Document id")->required();
  lp_cmd->add_option("--out", lp_out, "LP file (default: stdout)");

  // check-solution
  CorpusArgs chk_corpus;
  ModelOptions chk_model;
  std::string chk_doc;
  fs::path chk_solution;
  auto* chk_cmd = app.add_subcommand(
      "check-solution", "Verify an external solver's '<var> <0|1>' solution file");
  add_corpus_options(chk_cmd, chk_corpus);
  add_model_options(chk_cmd, chk_model);
  chk_cmd->add_option("--doc", chk_doc, "Document id")->required();
  chk_cmd->add_option("--solution", chk_solution, "Solution file")->required();

  // experiment
  fs::path exp_root, exp_weights, exp_ensembles, exp_split, exp_out;
  int exp_procedure = 1;
  std::vector<std::string> exp_base, exp_pool;
  double exp_time_limit = 300.0;
  ModelOptions exp_model;
  ScoringOptions exp_scoring;
  bool exp_individual = false;
  auto* exp_cmd = app.add_subcommand("experiment", "Score ensembles under procedure 1 or 2");
  exp_cmd->add_option("--corpus", exp_root, "Corpus root")->required();
  exp_cmd->add_option("--weights", exp_weights,
                      "Weights file (default: <corpus>/weights.txt)");
  exp_cmd->add_option("--procedure", exp_procedure,
                      "1: weights from the file, all documents; 2: weights from S1, scored on S2")
      ->check(CLI::IsMember({1, 2}));
  exp_cmd->add_option("--ensembles", exp_ensembles, "One ensemble per line");
  exp_cmd->add_option("--base", exp_base,
                      "Enumerate every superset of these members")
      ->delimiter(',');
  exp_cmd->add_option("--pool", exp_pool, "Pool for --base (default: all runs)")
      ->delimiter(',');
  exp_cmd->add_option("--split", exp_split, "'S1 <doc>' / 'S2 <doc>' lines");
  exp_cmd->add_option("--time-limit", exp_time_limit, "Seconds per document")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("--out", exp_out, "Write reconciled runs under this directory");
  exp_cmd->add_flag("--individual", exp_individual,
                    "Also score every classifier on its own");
  add_model_options(exp_cmd, exp_model);
  add_scoring_options(exp_cmd, exp_scoring);

  // gen-synthetic
  SyntheticSpec syn;
  syn.classifiers = default_synthetic_classifiers();
  fs::path syn_out;
  std::size_t syn_large_arcs = 0, syn_large_classifiers = 11;
  auto* syn_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic corpus");
  syn_cmd->add_option("--out", syn_out, "Corpus root to create")->required();
  syn_cmd->add_option("--seed", syn.seed, "Random seed");
  syn_cmd->add_option("--documents", syn.documents, "Number of documents");
  syn_cmd->add_option("--events", syn.events, "Event instances per document");
  syn_cmd->add_option("--timexes", syn.timexes, "Time expressions besides the DCT");
  syn_cmd->add_option("--links", syn.links, "Reference links per document");
  syn_cmd->add_option("--large-arcs", syn_large_arcs,
                      "Instead write one document with this many union arcs");
  syn_cmd->add_option("--classifiers", syn_large_classifiers,
                      "Classifier count for --large-arcs");

  // dump-composition-table
  fs::path dump_out;
  auto* dump_cmd = app.add_subcommand("dump-composition-table",
                                      "Print the 14x14 composition table");
  dump_cmd->add_option("--out", dump_out, "Output file (default: stdout)");

  // dot
  fs::path dot_file;
  bool dot_closure = false;
  auto* dot_cmd = app.add_subcommand("dot", "Render a TimeML file's TLINK graph as DOT");
  dot_cmd->add_option("file", dot_file, "TimeML file")->required();
  dot_cmd->add_flag("--closure", dot_closure, "Render the closed graph");

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::set<std::string> commands;
  for (const auto* sub : app.get_subcommands([](CLI::App*) { return true; }))
    commands.insert(sub->get_name());
  args = expand_config(std::move(args), commands);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (reconcile_cmd->parsed()) {
    const Corpus corpus = open_corpus(rec_corpus);
    const auto members = pick_members(corpus, rec_corpus.members);
    const Reconciliation rec = reconcile(members, corpus.document_ids(), rec_model,
                                         rec_time_limit, rec_name);
    write_run(rec.run, rec_out);
    if (!corpus.skipped.empty()) {
      std::ofstream skipped = open_output(rec_out / "skipped.txt");
      write_skipped_report(skipped, corpus.skipped);
    }
    {
      std::ofstream report = open_output(rec_out / "report.csv");
      print_solves(report, rec.documents);
    }
    print_solves(std::cout, rec.documents);
  } else if (score_cmd->parsed()) {
    std::vector<SkippedItem> skipped;
    std::vector<std::string> warnings;
    const ClassifierRun ref =
        load_run_directory(score_reference, "reference", 1.0, skipped, warnings);
    const ClassifierRun sys =
        load_run_directory(score_system, "system", 1.0, skipped, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    const ScoreReport report = score_run(ref, sys, split_list(score_docs), score_opts);
    emit(score_out, [&](std::ostream& out) {
      if (score_table)
        write_score_table({{score_system.filename().string(), "", report.f1,
                            report.precision, report.recall}},
                          out);
      else
        write_score_csv(report, out);
    });
  } else if (lp_cmd->parsed()) {
    const Corpus corpus = open_corpus(lp_corpus);
    const BinaryProgram program = program_for(corpus, lp_corpus, lp_doc, lp_model);
    emit(lp_out, [&](std::ostream& out) { export_lp(program, out); });
  } else if (chk_cmd->parsed()) {
    const Corpus corpus = open_corpus(chk_corpus);
    const BinaryProgram program = program_for(corpus, chk_corpus, chk_doc, chk_model);
    std::ifstream in(chk_solution);
    if (!in) throw DataError("cannot open " + chk_solution.string());
    const Solution solution = read_solution_file(program, in);
    const VerifyResult result = verify(program, solution);
    for (const auto& d : result.diagnostics) std::cout << d << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", solution.objective_value);
    std::cout << (result.ok ? "ok" : "invalid") << " objective " << buf << '\n';
    if (!result.ok) return kExitData;
  } else if (exp_cmd->parsed()) {
    ExperimentConfig config;
    config.corpus_root = exp_root;
    config.time_limit = exp_time_limit;
    config.model = exp_model;
    config.scoring = exp_scoring;
    config.output_dir = exp_out;
    if (!exp_split.empty()) {
      std::ifstream in(exp_split);
      if (!in) throw ConfigError("cannot open split file " + exp_split.string());
      config.split = parse_split(in);
    }
    CorpusArgs corpus_args{exp_root, exp_weights, {}};
    const Corpus corpus = open_corpus(corpus_args);

    std::vector<EnsembleSpec> ensembles;
    if (!exp_ensembles.empty()) {
      std::ifstream in(exp_ensembles);
      if (!in) throw ConfigError("cannot open ensembles file " + exp_ensembles.string());
      ensembles = parse_ensembles(in);
    }
    if (!exp_base.empty()) {
      EnsembleSpec base;
      base.members.insert(exp_base.begin(), exp_base.end());
      std::set<std::string> pool(exp_pool.begin(), exp_pool.end());
      if (pool.empty())
        for (const auto& [name, run] : corpus.runs) pool.insert(name);
      for (auto& spec : enumerate_ensembles(base, pool)) ensembles.push_back(std::move(spec));
    }
    if (ensembles.empty() && !exp_individual)
      throw ConfigError("give --ensembles, --base or --individual");

    const Split split = config.split ? *config.split : default_split(corpus.document_ids());
    if (exp_individual) {
      std::set<std::string> docs;
      if (exp_procedure == 2) docs.insert(split.s2.begin(), split.s2.end());
      std::vector<ScoreTableRow> rows;
      for (const auto& [name, run] : corpus.runs) {
        const ScoreReport r = score_run(corpus.reference, run, docs, config.scoring);
        rows.push_back({name, "", r.f1, r.precision, r.recall});
      }
      write_score_table(rows, std::cout);
      if (!ensembles.empty()) std::cout << '\n';
    }
    if (!ensembles.empty()) {
      const auto results = exp_procedure == 1
                               ? run_procedure_one(config, corpus, ensembles)
                               : run_procedure_two(config, corpus, ensembles);
      write_results_table(results, std::cout);
    }
  } else if (syn_cmd->parsed()) {
    const Corpus corpus = syn_large_arcs > 0
                              ? generate_large_document(syn.seed, syn_large_arcs,
                                                        syn_large_classifiers)
                              : generate_synthetic(syn);
    write_corpus(corpus, syn_out);
  } else if (dump_cmd->parsed()) {
    emit(dump_out, [](std::ostream& out) { CompositionTable::instance().dump(out); });
  } else if (dot_cmd->parsed()) {
    const TimemlDocument doc = parse_timeml_file(dot_file, dot_file.stem().string());
    EventGraph g = graph_from_links(doc.links, doc.entities);
    if (dot_closure) {
      auto closed = closure(g);
      if (!closed) throw DataError(dot_file.string() + ": inconsistent TLINK graph");
      g = std::move(*closed);
    }
    write_dot(g, std::cout, doc.id);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
