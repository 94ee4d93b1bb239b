#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tempens/evaluation.hpp"

using namespace tempens;

namespace {

EntityRef ev(const std::string& id, const std::string& doc = "d") {
  return {EntityKind::EventInstance, id, doc};
}

TLink link(const std::string& a, const std::string& b, RelType r,
           const std::string& doc = "d") {
  return {ev(a, doc), ev(b, doc), r, ""};
}

ClassifierRun run_of(std::map<std::string, std::vector<TLink>> docs) {
  ClassifierRun run;
  run.documents = std::move(docs);
  return run;
}

std::vector<TLink> flipped(std::vector<TLink> links, std::mt19937_64& rng) {
  for (auto& l : links)
    if (rng() % 2) l = {l.target, l.source, invert(l.rel), l.lid};
  return links;
}

std::vector<TLink> collapse_identity(std::vector<TLink> links) {
  for (auto& l : links)
    if (l.rel == RelType::Identity) l.rel = RelType::Simultaneous;
  return links;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("f1") {
  CHECK(f1_score(0.0, 0.0) == 0.0);
  CHECK(f1_score(1.0, 1.0) == 1.0);
  CHECK(f1_score(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("identical graphs score perfectly") {
  const auto g = graph_from_links({link("A", "B", RelType::Before),
                                   link("B", "C", RelType::Includes)});
  const auto r = temporal_awareness(g, g);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.counts.verified_sys == 2);
  CHECK(r.counts.total_ref == 2);
}

TEST_CASE("entailed relation counts for precision but not recall") {
  const auto ref = graph_from_links({link("A", "B", RelType::Before),
                                     link("B", "C", RelType::Before)});
  const auto sys = graph_from_links({link("A", "C", RelType::Before)});
  const auto r = temporal_awareness(ref, sys);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.0);
  CHECK(r.counts.verified_ref == 0);
  CHECK(r.counts.total_ref == 2);
  // And the other way round, the chain entails A before C.
  const auto back = temporal_awareness(sys, ref);
  CHECK(back.recall == 1.0);
  CHECK(back.precision == 0.0);
}

TEST_CASE("empty system against a non-empty reference") {
  const auto ref = graph_from_links({link("A", "B", RelType::Before)});
  const auto r = temporal_awareness(ref, EventGraph{});
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
}

TEST_CASE("micro and macro averages") {
  // System side: 1 of 2 verified in d1, 3 of 4 in d2.
  const ClassifierRun ref = run_of(
      {{"d1", {link("A", "B", RelType::Before, "d1")}},
       {"d2", {link("A", "B", RelType::Before, "d2"), link("B", "C", RelType::Before, "d2"),
               link("C", "D", RelType::Before, "d2")}}});
  const ClassifierRun sys = run_of(
      {{"d1", {link("A", "B", RelType::Before, "d1"), link("A", "C", RelType::After, "d1")}},
       {"d2", {link("A", "B", RelType::Before, "d2"), link("B", "C", RelType::Before, "d2"),
               link("A", "C", RelType::Before, "d2"), link("A", "D", RelType::After, "d2")}}});
  const ScoreReport micro = score_run(ref, sys);
  CHECK(micro.per_document.at("d1").counts.verified_sys == 1);
  CHECK(micro.per_document.at("d1").counts.total_sys == 2);
  CHECK(micro.per_document.at("d2").counts.verified_sys == 3);
  CHECK(micro.per_document.at("d2").counts.total_sys == 4);
  CHECK(micro.precision == doctest::Approx(4.0 / 6.0).epsilon(1e-15));

  ScoringOptions macro_opts;
  macro_opts.macro_average = true;
  const ScoreReport macro = score_run(ref, sys, {}, macro_opts);
  CHECK(macro.precision == doctest::Approx(0.625));
}

TEST_CASE("score_run filtering and missing documents") {
  const ClassifierRun ref = run_of({{"d1", {link("A", "B", RelType::Before, "d1")}},
                                    {"d2", {link("A", "B", RelType::After, "d2")}}});
  const ClassifierRun sys = run_of({{"d1", {link("A", "B", RelType::Before, "d1")}}});
  const ScoreReport one = score_run(ref, sys, {"d1"});
  CHECK(one.per_document.size() == 1);
  CHECK(one.f1 == 1.0);
  const ScoreReport both = score_run(ref, sys);
  CHECK(both.per_document.at("d2").counts.total_sys == 0);
  CHECK(both.recall == 0.5);
  CHECK_THROWS_AS(score_run(ref, sys, {"d9"}), ConfigError);
}

TEST_CASE("inconsistent graphs are scored raw and flagged") {
  const auto cyc = graph_from_links({link("A", "B", RelType::Before),
                                     link("B", "C", RelType::Before),
                                     link("C", "A", RelType::Before)});
  const auto ref = graph_from_links({link("A", "B", RelType::Before)});
  const auto r = temporal_awareness(ref, cyc);
  CHECK(r.system_inconsistent);
  CHECK_FALSE(r.reference_inconsistent);
  CHECK(r.counts.verified_ref == 1);
  CHECK(r.counts.verified_sys == 1);
  CHECK(r.counts.total_sys == 3);
}

TEST_CASE("identity collapse switch") {
  const auto ref = graph_from_links({link("A", "B", RelType::Simultaneous)});
  const auto sys = graph_from_links({link("A", "B", RelType::Identity)});
  CHECK(temporal_awareness(ref, sys).precision == 1.0);
  ScoringOptions strict;
  strict.collapse_identity = false;
  const auto r = temporal_awareness(ref, sys, strict);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
}

TEST_CASE("DURING is scored as IS_INCLUDED") {
  const auto ref = graph_from_links({link("A", "B", RelType::IsIncluded)});
  const auto sys = graph_from_links({link("B", "A", RelType::DuringInv)});
  const auto r = temporal_awareness(ref, sys);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
}

TEST_CASE("properties on random consistent graphs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto links = oracle::random_consistent_links(rng, 8, 0.5, "d");
    const auto g = graph_from_links(links);
    const auto self = temporal_awareness(g, g);
    CHECK_FALSE(self.reference_inconsistent);
    CHECK(self.counts.verified_sys == self.counts.total_sys);
    if (g.edge_count() > 0) {
      CHECK(self.precision == 1.0);
      CHECK(self.recall == 1.0);
    }

    // A noisy system: a subset of the truth plus one wrong label.
    std::vector<TLink> sys_links;
    for (const auto& l : links)
      if (rng() % 2) sys_links.push_back(l);
    if (!links.empty()) {
      TLink wrong = links[rng() % links.size()];
      wrong.rel = wrong.rel == RelType::Before ? RelType::After : RelType::Before;
      sys_links.push_back(wrong);
    }
    const auto base = temporal_awareness(g, graph_from_links(sys_links));

    // Orientation flips on either side change nothing.
    const auto flip_both = temporal_awareness(graph_from_links(flipped(links, rng)),
                                              graph_from_links(flipped(sys_links, rng)));
    CHECK(flip_both.precision == base.precision);
    CHECK(flip_both.recall == base.recall);

    // IDENTITY -> SIMULTANEOUS on either side changes nothing.
    const auto collapsed = temporal_awareness(graph_from_links(collapse_identity(links)),
                                              graph_from_links(sys_links));
    CHECK(collapsed.precision == base.precision);
    CHECK(collapsed.recall == base.recall);
  }
}

TEST_CASE("adding an entailed relation never lowers the scores") {
  std::mt19937_64 rng(77);
  int added = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto links = oracle::random_consistent_links(rng, 7, 0.6, "d");
    const auto ref = graph_from_links(links);
    std::vector<TLink> sys_links;
    for (const auto& l : links)
      if (rng() % 3 == 0) sys_links.push_back(l);
    const auto before = temporal_awareness(ref, graph_from_links(sys_links));
    const auto closed = closure(ref);
    REQUIRE(closed);
    for (const auto& [key, set] : closed->edges()) {
      if (!set.collapsed().is_singleton()) continue;
      if (graph_from_links(sys_links).relation(key.first, key.second)) continue;
      auto more = sys_links;
      more.push_back({key.first, key.second, set.collapsed().first(), ""});
      const auto after = temporal_awareness(ref, graph_from_links(more));
      CHECK(after.precision >= before.precision);
      CHECK(after.recall >= before.recall);
      ++added;
      break;
    }
  }
  CHECK(added > 50);
}

TEST_CASE("CSV report") {
  const ClassifierRun ref = run_of({{"d1", {link("A", "B", RelType::Before, "d1")}}});
  const ClassifierRun sys = run_of({{"d1", {link("A", "B", RelType::Before, "d1"),
                                            link("B", "C", RelType::Before, "d1")}}});
  std::ostringstream out;
  write_score_csv(score_run(ref, sys), out);
  CHECK(out.str() ==
        "doc_id,precision,recall,f1,verified_sys,total_sys,verified_ref,total_ref\n"
        "d1,0.500000,1.000000,0.666667,1,2,1,1\n"
        "ALL,0.500000,1.000000,0.666667,1,2,1,1\n");
}

TEST_CASE("aligned table") {
  std::ostringstream out;
  write_score_table({{"C2", "cleartk-2", 0.3624, 0.3732, 0.3521},
                     {"U4", "UTTime-4", 0.2882, 0.2, 0.5}},
                    out);
  CHECK(out.str() ==
        "IDs  Classifier  F1      Precision  Recall\n"
        "C2   cleartk-2   0.3624  0.3732     0.3521\n"
        "U4   UTTime-4    0.2882  0.2000     0.5000\n");
}

}
