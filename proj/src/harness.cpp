#include "tempens/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace tempens {

std::string EnsembleSpec::display_label() const {
  if (!label.empty()) return label;
  std::string out;
  for (const auto& m : members) {
    if (!out.empty()) out += ", ";
    out += m;
  }
  return out;
}

std::vector<EnsembleSpec> parse_ensembles(std::istream& in) {
  std::vector<EnsembleSpec> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    EnsembleSpec spec;
    if (auto colon = line.find(':'); colon != std::string::npos) {
      spec.label = line.substr(0, colon);
      line.erase(0, colon + 1);
      const auto b = spec.label.find_first_not_of(" \t");
      const auto e = spec.label.find_last_not_of(" \t");
      spec.label = b == std::string::npos ? "" : spec.label.substr(b, e - b + 1);
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream names(line);
    std::string name;
    while (names >> name) spec.members.insert(name);
    if (spec.members.empty()) {
      if (!spec.label.empty())
        throw ConfigError("ensembles line " + std::to_string(lineno) +
                          ": no members");
      continue;
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<EnsembleSpec> enumerate_ensembles(const EnsembleSpec& base,
                                              const std::set<std::string>& pool) {
  for (const auto& m : base.members)
    if (!pool.count(m))
      throw ConfigError("base member " + m + " is not in the pool");
  std::vector<std::string> extra;
  for (const auto& name : pool)
    if (!base.members.count(name)) extra.push_back(name);
  if (extra.size() > 20) throw ConfigError("too many optional members");

  std::vector<EnsembleSpec> out;
  const std::uint32_t n_subsets = 1u << extra.size();
  out.reserve(n_subsets);
  for (std::uint32_t mask = 0; mask < n_subsets; ++mask) {
    EnsembleSpec spec;
    spec.members = base.members;
    spec.weights_source = base.weights_source;
    for (std::size_t k = 0; k < extra.size(); ++k)
      if ((mask >> k) & 1u) spec.members.insert(extra[k]);
    out.push_back(std::move(spec));
  }
  std::sort(out.begin(), out.end(), [](const EnsembleSpec& a, const EnsembleSpec& b) {
    if (a.members.size() != b.members.size())
      return a.members.size() < b.members.size();
    return std::lexicographical_compare(a.members.begin(), a.members.end(),
                                        b.members.begin(), b.members.end());
  });
  return out;
}

Split default_split(std::vector<std::string> doc_ids) {
  std::sort(doc_ids.begin(), doc_ids.end());
  Split split;
  const std::size_t half = doc_ids.size() / 2;
  split.s1.assign(doc_ids.begin(), doc_ids.begin() + half);
  split.s2.assign(doc_ids.begin() + half, doc_ids.end());
  return split;
}

Split parse_split(std::istream& in) {
  Split split;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string side, doc;
    if (!(fields >> side)) continue;
    if (!(fields >> doc) || (side != "S1" && side != "S2"))
      throw ConfigError("split line " + std::to_string(lineno) +
                        ": expected 'S1 <doc>' or 'S2 <doc>'");
    if (!seen.insert(doc).second)
      throw ConfigError("document " + doc + " appears twice in the split");
    (side == "S1" ? split.s1 : split.s2).push_back(doc);
  }
  return split;
}

// ---------------------------------------------------------------------------

Reconciliation reconcile(const std::vector<ClassifierRun>& members,
                         const std::vector<std::string>& documents,
                         const ModelOptions& model, double time_limit,
                         const std::string& name) {
  Reconciliation out;
  out.run.name = name;
  out.run.f1_weight = 1.0;
  for (const auto& doc : documents) {
    const VoteTable votes = collect_arcs(members, doc, model);
    const BinaryProgram program = build_ip(votes, model);
    SolveOptions opts;
    opts.time_limit = time_limit;
    const Solution solution = solve(program, opts);

    DocumentSolve info;
    info.document = doc;
    info.arcs = program.num_arcs();
    info.num_vars = program.num_vars();
    info.rows = program.num_rows();
    info.status = solution.status;
    info.objective = solution.objective_value;
    info.seconds = solution.stats.wall_time;

    std::set<EntityRef> entities;
    for (const auto& m : members) {
      auto it = m.entities.find(doc);
      if (it != m.entities.end()) entities.insert(it->second.begin(), it->second.end());
    }
    std::vector<TLink> links;
    EventGraph labelled;
    if (solution.has_assignment()) {
      for (std::size_t i = 0; i < program.num_arcs(); ++i) {
        const RelType r = solution.assignment[i];
        const auto& arc = program.arcs[i];
        entities.insert(arc.lo);
        entities.insert(arc.hi);
        if (r == RelType::None) continue;
        links.push_back({arc.lo, arc.hi, r, "l" + std::to_string(i)});
        labelled.set_relation(arc.lo, arc.hi, r);
      }
      info.consistent =
          verify(program, solution).ok && is_consistent_labeling(labelled);
    }
    out.run.documents[doc] = std::move(links);
    out.run.entities[doc].assign(entities.begin(), entities.end());
    out.documents.push_back(std::move(info));
  }
  return out;
}

std::vector<ClassifierRun> select_members(
    const Corpus& corpus, const EnsembleSpec& spec,
    const std::map<std::string, double>* weights) {
  std::vector<ClassifierRun> members;
  for (const auto& name : spec.members) {
    auto it = corpus.runs.find(name);
    if (it == corpus.runs.end())
      throw ConfigError("unknown ensemble member " + name);
    ClassifierRun run = it->second;
    if (weights) {
      auto w = weights->find(name);
      if (w == weights->end()) throw ConfigError("no weight for " + name);
      run.f1_weight = w->second;
    }
    members.push_back(std::move(run));
  }
  return members;
}

namespace {

EnsembleResult run_one(const ExperimentConfig& config, const Corpus& corpus,
                       const EnsembleSpec& spec,
                       const std::vector<std::string>& docs,
                       const std::map<std::string, double>* weights) {
  EnsembleResult result;
  result.spec = spec;
  const auto members = select_members(corpus, spec, weights);
  for (const auto& m : members) result.weights[m.name] = m.f1_weight;
  Reconciliation rec = reconcile(members, docs, config.model, config.time_limit,
                                 spec.display_label());
  const std::set<std::string> filter(docs.begin(), docs.end());
  result.report = score_run(corpus.reference, rec.run, filter, config.scoring);
  result.solves = std::move(rec.documents);
  if (!config.output_dir.empty()) {
    std::string dir_name;
    for (const auto& m : spec.members) dir_name += (dir_name.empty() ? "" : "+") + m;
    write_run(rec.run, config.output_dir / dir_name);
  }
  return result;
}

}  // namespace

std::vector<EnsembleResult> run_procedure_one(
    const ExperimentConfig& config, const Corpus& corpus,
    const std::vector<EnsembleSpec>& ensembles) {
  const auto docs = corpus.document_ids();
  std::vector<EnsembleResult> out;
  for (const auto& spec : ensembles)
    out.push_back(run_one(config, corpus, spec, docs, nullptr));
  return out;
}

std::vector<EnsembleResult> run_procedure_two(
    const ExperimentConfig& config, const Corpus& corpus,
    const std::vector<EnsembleSpec>& ensembles) {
  const Split split = config.split ? *config.split : default_split(corpus.document_ids());
  for (const auto& d : split.s1)
    if (std::find(split.s2.begin(), split.s2.end(), d) != split.s2.end())
      throw ConfigError("document " + d + " is in both S1 and S2");
  if (split.s1.empty() || split.s2.empty())
    throw ConfigError("procedure two needs non-empty S1 and S2");

  const std::set<std::string> s1(split.s1.begin(), split.s1.end());
  std::map<std::string, double> weights;
  for (const auto& spec : ensembles) {
    for (const auto& name : spec.members) {
      if (weights.count(name)) continue;
      auto it = corpus.runs.find(name);
      if (it == corpus.runs.end())
        throw ConfigError("unknown ensemble member " + name);
      weights[name] = score_run(corpus.reference, it->second, s1, config.scoring).f1;
    }
  }

  std::vector<EnsembleResult> out;
  for (const auto& spec : ensembles)
    out.push_back(run_one(config, corpus, spec, split.s2, &weights));
  return out;
}

void write_results_table(const std::vector<EnsembleResult>& results,
                         std::ostream& out) {
  std::vector<ScoreTableRow> rows;
  for (const auto& r : results)
    rows.push_back({r.spec.display_label(), "", r.report.f1, r.report.precision,
                    r.report.recall});
  write_score_table(rows, out);
}

void write_run(const ClassifierRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  static const std::vector<EntityRef> kNone;
  for (const auto& [doc, links] : run.documents) {
    std::ofstream out(dir / (doc + ".tml"), std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / (doc + ".tml")).string());
    auto ents = run.entities.find(doc);
    write_timeml(out, doc, ents == run.entities.end() ? kNone : ents->second, links);
  }
}

}  // namespace tempens
