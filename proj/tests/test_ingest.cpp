#include <sstream>

#include "doctest.h"
#include "tempens/ingest.hpp"
#include "test_util.hpp"

using namespace tempens;

namespace {

const char* kDoc = R"(<?xml version="1.0" encoding="UTF-8"?>
<TimeML>
<DOCID>d1</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="2013-03-22" functionInDocument="CREATION_TIME">March 22</TIMEX3></DCT>
<TEXT>Officials <EVENT eid="e1" class="OCCURRENCE">said</EVENT> the plant
<EVENT eid="e2" class="OCCURRENCE">closed</EVENT> <TIMEX3 tid="t1" type="DATE" value="2013-03-20">Wednesday</TIMEX3>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1" tense="PAST"/>
<MAKEINSTANCE eiid="ei2" eventID="e2" tense="PAST"/>
<TLINK lid="l1" relType="BEFORE" eventInstanceID="ei1" relatedToTime="t0"/>
<TLINK lid="l2" relType="IS_INCLUDED" eventInstanceID="ei2" relatedToTime="t1"/>
<TLINK lid="l3" relType="OVERLAP" eventInstanceID="ei1" relatedToEventInstance="ei2"/>
<TLINK lid="l4" relType="AFTER" eventInstanceID="ei1" relatedToEventInstance="ei9"/>
<TLINK relType="BEFORE" timeID="t1" relatedToTime="t0" signalID="s1"/>
<TLINK lid="l6" relType="SIMULTANEOUS" eventInstanceID="ei1" relatedToEventInstance="ei1"/>
</TimeML>
)";

EntityRef ev(const std::string& id, const std::string& doc = "d1") {
  return {EntityKind::EventInstance, id, doc};
}

std::string tml(const std::vector<std::string>& tlinks) {
  std::string s = "<TimeML><TIMEX3 tid=\"t0\" functionInDocument=\"CREATION_TIME\"/>"
                  "<MAKEINSTANCE eiid=\"ei1\"/><MAKEINSTANCE eiid=\"ei2\"/>"
                  "<MAKEINSTANCE eiid=\"ei3\"/>";
  for (const auto& t : tlinks) s += t;
  return s + "</TimeML>";
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("parse_timeml maps entities, links and skips") {
  const TimemlDocument doc = parse_timeml(kDoc, "d1");
  REQUIRE(doc.entities.size() == 4);
  CHECK(doc.entities[0] == EntityRef{EntityKind::Dct, "t0", "d1"});
  CHECK(doc.entities[1] == EntityRef{EntityKind::Timex, "t1", "d1"});
  CHECK(doc.entities[2] == ev("ei1"));

  REQUIRE(doc.links.size() == 3);
  CHECK(doc.links[0].source == ev("ei1"));
  CHECK(doc.links[0].target == EntityRef{EntityKind::Dct, "t0", "d1"});
  CHECK(doc.links[0].rel == RelType::Before);
  CHECK(doc.links[0].lid == "l1");
  CHECK(doc.links[1].rel == RelType::IsIncluded);
  CHECK(doc.links[2].source.kind == EntityKind::Timex);
  CHECK(doc.links[2].target.kind == EntityKind::Dct);

  REQUIRE(doc.skipped.size() == 3);
  CHECK(doc.skipped[0].item == "l3");
  CHECK(doc.skipped[0].reason == "unknown-reltype:OVERLAP");
  CHECK(doc.skipped[1].reason == "dangling-endpoint:ei9");
  CHECK(doc.skipped[2].reason == "self-loop:ei1");
  // Conservation.
  CHECK(doc.links.size() + doc.skipped.size() == doc.tlink_elements);
  CHECK(doc.tlink_elements == 6);
}

TEST_CASE("unnamed TLINK is reported by index") {
  const auto doc = parse_timeml(
      tml({R"(<TLINK relType="FOO" eventInstanceID="ei1" relatedToTime="t0"/>)"}), "x");
  REQUIRE(doc.skipped.size() == 1);
  CHECK(doc.skipped[0].item == "#0");
  std::ostringstream report;
  write_skipped_report(report, doc.skipped);
  CHECK(report.str() == "x #0 unknown-reltype:FOO\n");
}

TEST_CASE("document without TLINKs still yields entities") {
  const auto doc = parse_timeml(tml({}), "x");
  CHECK(doc.links.empty());
  CHECK(doc.entities.size() == 4);
  CHECK(doc.tlink_elements == 0);
}

TEST_CASE("NONE is not accepted as an input relType") {
  const auto doc = parse_timeml(
      tml({R"(<TLINK lid="a" relType="NONE" eventInstanceID="ei1" relatedToTime="t0"/>)"}), "x");
  CHECK(doc.links.empty());
  CHECK(doc.skipped.size() == 1);
}

TEST_CASE("malformed XML reports line and column") {
  const std::string bad = "<TimeML>\n<TLINK lid=\"l1\"\n  relType=BEFORE/>\n</TimeML>";
  try {
    parse_timeml(bad, "bad");
    FAIL("expected a parse error");
  } catch (const XmlParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 11);
    CHECK(std::string(e.what()).find("bad:3:11") == 0);
  }
  CHECK_THROWS_AS(parse_timeml("<TimeML><a></TimeML>", "x"), DataError);
}

TEST_CASE("parsing is deterministic") {
  const auto a = parse_timeml(kDoc, "d1");
  const auto b = parse_timeml(kDoc, "d1");
  CHECK(a.entities == b.entities);
  REQUIRE(a.links.size() == b.links.size());
  for (std::size_t i = 0; i < a.links.size(); ++i) {
    CHECK(a.links[i].source == b.links[i].source);
    CHECK(a.links[i].rel == b.links[i].rel);
  }
}

TEST_CASE("write_timeml round trip") {
  const auto doc = parse_timeml(kDoc, "d1");
  std::ostringstream out;
  write_timeml(out, "d1", doc.entities, doc.links);
  const auto again = parse_timeml(out.str(), "d1");
  CHECK(std::set<EntityRef>(again.entities.begin(), again.entities.end()) ==
        std::set<EntityRef>(doc.entities.begin(), doc.entities.end()));
  REQUIRE(again.links.size() == doc.links.size());
  for (std::size_t i = 0; i < doc.links.size(); ++i) {
    CHECK(again.links[i].source == doc.links[i].source);
    CHECK(again.links[i].target == doc.links[i].target);
    CHECK(again.links[i].rel == doc.links[i].rel);
  }
  CHECK(again.skipped.empty());
}

TEST_CASE("entity order: DCT < TIMEX < EVENT_INSTANCE, then id") {
  const EntityRef dct{EntityKind::Dct, "t9", "d"};
  const EntityRef timex{EntityKind::Timex, "t1", "d"};
  const EntityRef e10{EntityKind::EventInstance, "ei10", "d"};
  const EntityRef e2{EntityKind::EventInstance, "ei2", "d"};
  CHECK(dct < timex);
  CHECK(timex < e10);
  CHECK(e10 < e2);
}

TEST_CASE("canonicalize examples") {
  const EntityRef a = ev("a"), b = ev("b");
  auto [arc1, r1] = canonicalize({a, b, RelType::Before, ""});
  CHECK(arc1.lo == a);
  CHECK(arc1.hi == b);
  CHECK(r1 == RelType::Before);
  auto [arc2, r2] = canonicalize({b, a, RelType::Before, ""});
  CHECK(arc2 == arc1);
  CHECK(r2 == RelType::After);
  auto [arc3, r3] = canonicalize({b, a, RelType::Begins, ""});
  CHECK(arc3 == arc1);
  CHECK(r3 == RelType::BegunBy);
  CHECK(arc1.document() == "d1");
  CHECK_THROWS_AS(canonicalize({a, a, RelType::Before, ""}), std::invalid_argument);
}

TEST_CASE("canonicalize is idempotent") {
  const std::vector<EntityRef> ents = {ev("x"), ev("y"), {EntityKind::Dct, "t0", "d1"}};
  for (const auto& s : ents)
    for (const auto& t : ents) {
      if (s == t) continue;
      for (RelType r : proper_labels()) {
        auto [arc, rel] = canonicalize({s, t, r, ""});
        auto [arc2, rel2] = canonicalize({arc.lo, arc.hi, rel, ""});
        CHECK(arc2 == arc);
        CHECK(rel2 == rel);
      }
    }
}

TEST_CASE("weights file") {
  std::istringstream in("# F1 on Platinum\ncleartk-2 0.3624\n\nUTTime-4 0.2882  # comment\n");
  const auto w = parse_weights(in);
  CHECK(w.size() == 2);
  CHECK(w.at("cleartk-2") == 0.3624);
  CHECK(w.at("UTTime-4") == 0.2882);
  std::istringstream bad("x\n");
  CHECK_THROWS_AS(parse_weights(bad), ConfigError);
  std::istringstream neg("x -0.1\n");
  CHECK_THROWS_AS(parse_weights(neg), ConfigError);
  CHECK_THROWS_AS(load_weights("/nonexistent/weights.txt"), ConfigError);
}

TEST_CASE("load_corpus") {
  TempDir dir;
  const auto& root = dir.path();
  const std::string l1 = R"(<TLINK lid="l1" relType="BEFORE" eventInstanceID="ei1" relatedToEventInstance="ei2"/>)";
  const std::string l2 = R"(<TLINK lid="l2" relType="AFTER" eventInstanceID="ei2" relatedToEventInstance="ei3"/>)";
  write_file(root / "reference/docA.tml", tml({l1}));
  write_file(root / "reference/docB.tml", tml({l2}));
  write_file(root / "runs/cleartk-2/docA.tml", tml({l1}));
  write_file(root / "runs/cleartk-2/docB.tml", tml({l2}));
  write_file(root / "runs/other/docA.tml", tml({l1, l2}));

  SUBCASE("two classifiers, one missing a document") {
    const auto corpus = load_corpus(root, {{"cleartk-2", 0.3624}, {"other", 0.5}});
    CHECK(corpus.runs.size() == 2);
    CHECK(corpus.document_ids() == std::vector<std::string>{"docA", "docB"});
    CHECK(corpus.runs.at("cleartk-2").f1_weight == 0.3624);
    CHECK(corpus.runs.at("cleartk-2").documents.size() == 2);
    CHECK(corpus.runs.at("other").documents.size() == 1);
    REQUIRE(corpus.warnings.size() == 1);
    CHECK(corpus.warnings[0] == "other: no output for document docB");
  }
  SUBCASE("missing weight is a configuration error") {
    CHECK_THROWS_AS(load_corpus(root, {{"cleartk-2", 0.3624}}), ConfigError);
  }
  SUBCASE("missing layout is a data error") {
    CHECK_THROWS_AS(load_corpus(root / "nope", {}), DataError);
  }
}

TEST_CASE("duplicate TLINKs keep the last occurrence") {
  TempDir dir;
  write_file(dir.path() / "run/d.tml",
             tml({R"(<TLINK lid="l1" relType="BEFORE" eventInstanceID="ei1" relatedToEventInstance="ei2"/>)",
                  R"(<TLINK lid="l2" relType="BEFORE" eventInstanceID="ei2" relatedToEventInstance="ei1"/>)"}));
  std::vector<SkippedItem> skipped;
  std::vector<std::string> warnings;
  const auto run = load_run_directory(dir.path() / "run", "r", 1.0, skipped, warnings);
  REQUIRE(run.documents.at("d").size() == 1);
  CHECK(run.documents.at("d")[0].lid == "l2");
  CHECK(warnings.size() == 1);
}

}
