#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "tempens/harness.hpp"

namespace tempens {

namespace {

// Helpers over the raw engine output; the standard distributions are not
// reproducible across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct Interval {
  int start;
  int end;
};

// TimeML label of x relative to y, or NONE when the intervals overlap
// partially (no TimeML label exists for that).
RelType true_relation(Interval x, Interval y) {
  if (x.end < y.start) return RelType::Before;
  if (y.end < x.start) return RelType::After;
  if (x.end == y.start) return RelType::IBefore;
  if (y.end == x.start) return RelType::IAfter;
  if (x.start == y.start && x.end == y.end) return RelType::Simultaneous;
  if (x.start == y.start) return x.end < y.end ? RelType::Begins : RelType::BegunBy;
  if (x.end == y.end) return x.start > y.start ? RelType::Ends : RelType::EndedBy;
  if (x.start > y.start && x.end < y.end) return RelType::IsIncluded;
  if (x.start < y.start && x.end > y.end) return RelType::Includes;
  return RelType::None;
}

RelType random_proper(Rng& rng) {
  return static_cast<RelType>(rng.below(kNumProperLabels) + 1);
}

RelType random_other(Rng& rng, RelType avoid) {
  RelType r = static_cast<RelType>(rng.below(kNumProperLabels - 1) + 1);
  if (ordinal(r) >= ordinal(avoid)) r = static_cast<RelType>(ordinal(r) + 1);
  return r;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

struct SyntheticDoc {
  std::string id;
  std::vector<EntityRef> entities;
  std::vector<Interval> intervals;
};

SyntheticDoc make_doc(Rng& rng, const std::string& id, std::size_t timexes,
                      std::size_t events) {
  SyntheticDoc doc;
  doc.id = id;
  const int span = static_cast<int>(std::max<std::size_t>(6, (events + timexes) / 2));
  auto interval = [&](int max_len) {
    const int s = static_cast<int>(rng.below(span));
    return Interval{s, s + 1 + static_cast<int>(rng.below(max_len))};
  };
  doc.entities.push_back({EntityKind::Dct, "t0", id});
  doc.intervals.push_back(interval(2));
  for (std::size_t t = 1; t <= timexes; ++t) {
    doc.entities.push_back({EntityKind::Timex, "t" + std::to_string(t), id});
    doc.intervals.push_back(interval(4));
  }
  for (std::size_t e = 1; e <= events; ++e) {
    doc.entities.push_back({EntityKind::EventInstance, "ei" + std::to_string(e), id});
    doc.intervals.push_back(interval(3));
  }
  return doc;
}

TLink oriented_link(Rng& rng, const SyntheticDoc& doc, std::size_t a,
                    std::size_t b, RelType rel_ab) {
  if (rng.chance(0.5)) return {doc.entities[a], doc.entities[b], rel_ab, ""};
  return {doc.entities[b], doc.entities[a], invert(rel_ab), ""};
}

}  // namespace

std::vector<SyntheticClassifier> default_synthetic_classifiers() {
  return {
      {"alpha", 0.80, 0.15, 0.10},
      {"beta", 0.60, 0.25, 0.20},
      {"gamma", 0.70, 0.30, 0.05},
      {"delta", 0.50, 0.10, 0.30},
  };
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  Corpus corpus;
  corpus.reference.name = "reference";
  corpus.reference.f1_weight = 1.0;
  for (const auto& c : spec.classifiers) {
    ClassifierRun run;
    run.name = c.name;
    corpus.runs.emplace(c.name, std::move(run));
  }

  for (std::size_t d = 0; d < spec.documents; ++d) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "syn%03zu", d);
    const SyntheticDoc doc = make_doc(rng, id_buf, spec.timexes, spec.events);
    const std::size_t n = doc.entities.size();

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    rng.shuffle(pairs);

    std::vector<std::pair<std::size_t, std::size_t>> labelled, unlabelled;
    for (const auto& [a, b] : pairs) {
      const RelType rel = true_relation(doc.intervals[a], doc.intervals[b]);
      if (rel != RelType::None && labelled.size() < spec.links)
        labelled.emplace_back(a, b);
      else
        unlabelled.emplace_back(a, b);
    }

    auto& ref_links = corpus.reference.documents[doc.id];
    for (const auto& [a, b] : labelled)
      ref_links.push_back(oriented_link(
          rng, doc, a, b, true_relation(doc.intervals[a], doc.intervals[b])));
    corpus.reference.entities[doc.id] = doc.entities;

    for (const auto& c : spec.classifiers) {
      auto& run = corpus.runs.at(c.name);
      auto& links = run.documents[doc.id];
      run.entities[doc.id] = doc.entities;
      for (const auto& [a, b] : labelled) {
        const RelType truth = true_relation(doc.intervals[a], doc.intervals[b]);
        if (rng.chance(c.coverage)) {
          const RelType guess =
              rng.chance(c.error_rate) ? random_other(rng, truth) : truth;
          links.push_back(oriented_link(rng, doc, a, b, guess));
        }
        if (!unlabelled.empty() && rng.chance(c.spurious_rate)) {
          const auto& [u, v] = unlabelled[rng.below(unlabelled.size())];
          const RelType t = true_relation(doc.intervals[u], doc.intervals[v]);
          const RelType guess =
              t != RelType::None && rng.chance(0.5) ? t : random_proper(rng);
          links.push_back(oriented_link(rng, doc, u, v, guess));
        }
      }
      // Drop repeated pairs, keeping the first prediction.
      std::set<CanonicalArc> seen;
      std::vector<TLink> unique;
      for (auto& link : links)
        if (seen.insert(canonicalize(link).first).second)
          unique.push_back(std::move(link));
      links = std::move(unique);
      for (std::size_t k = 0; k < links.size(); ++k)
        links[k].lid = "l" + std::to_string(k + 1);
    }
    for (std::size_t k = 0; k < ref_links.size(); ++k)
      ref_links[k].lid = "l" + std::to_string(k + 1);
  }

  for (auto& [name, run] : corpus.runs)
    run.f1_weight = round4(score_run(corpus.reference, run).f1);
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& root) {
  write_run(corpus.reference, root / "reference");
  for (const auto& [name, run] : corpus.runs) write_run(run, root / "runs" / name);
  std::ofstream weights(root / "weights.txt");
  if (!weights) throw DataError("cannot write weights.txt under " + root.string());
  weights << "# classifier F1\n";
  for (const auto& [name, run] : corpus.runs) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", run.f1_weight);
    weights << name << ' ' << buf << '\n';
  }
}

Corpus generate_large_document(std::uint64_t seed, std::size_t arcs,
                               std::size_t classifiers) {
  Rng rng(seed);
  // Roughly the density of a long newswire document: every event tied to
  // the DCT plus links between events a few positions apart.
  const std::size_t events = std::max<std::size_t>(8, arcs * 2 / 7);
  const std::size_t timexes = std::max<std::size_t>(2, events / 15);
  const SyntheticDoc doc = make_doc(rng, "large", timexes, events);
  const std::size_t first_event = 1 + timexes;

  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t e = first_event; e < doc.entities.size(); ++e) {
    candidates.emplace_back(0, e);
    for (std::size_t w = 1; w <= 3 && e + w < doc.entities.size(); ++w)
      candidates.emplace_back(e, e + w);
    const std::size_t t = 1 + (e - first_event) * timexes / events;
    candidates.emplace_back(t, e);
  }
  rng.shuffle(candidates);
  if (candidates.size() < arcs)
    throw ConfigError("cannot place " + std::to_string(arcs) + " arcs");
  candidates.resize(arcs);

  Corpus corpus;
  corpus.reference.name = "reference";
  corpus.reference.f1_weight = 1.0;
  corpus.reference.entities[doc.id] = doc.entities;
  auto& ref_links = corpus.reference.documents[doc.id];

  std::vector<std::vector<TLink>> predictions(classifiers);
  for (const auto& [a, b] : candidates) {
    const RelType truth = true_relation(doc.intervals[a], doc.intervals[b]);
    if (truth != RelType::None && rng.chance(0.5))
      ref_links.push_back(oriented_link(rng, doc, a, b, truth));
    // At least one classifier votes on every arc.
    const std::size_t forced = rng.below(classifiers);
    for (std::size_t c = 0; c < classifiers; ++c) {
      if (c != forced && !rng.chance(0.45)) continue;
      RelType guess;
      if (truth == RelType::None || rng.chance(0.3))
        guess = random_proper(rng);
      else
        guess = truth;
      predictions[c].push_back(oriented_link(rng, doc, a, b, guess));
    }
  }
  for (std::size_t k = 0; k < ref_links.size(); ++k)
    ref_links[k].lid = "l" + std::to_string(k + 1);

  for (std::size_t c = 0; c < classifiers; ++c) {
    ClassifierRun run;
    char name[32];
    std::snprintf(name, sizeof name, "clf%02zu", c + 1);
    run.name = name;
    // Weights in [0.25, 0.40], rounded to four decimals.
    run.f1_weight = round4(0.25 + 0.15 * rng.unit());
    run.entities[doc.id] = doc.entities;
    run.documents[doc.id] = std::move(predictions[c]);
    for (std::size_t k = 0; k < run.documents[doc.id].size(); ++k)
      run.documents[doc.id][k].lid = "l" + std::to_string(k + 1);
    corpus.runs.emplace(run.name, std::move(run));
  }
  return corpus;
}

}  // namespace tempens
