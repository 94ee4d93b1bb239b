#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace tempens::oracle {

namespace {

using C = Cmp;

Cmp cmp(int a, int b) { return a < b ? C::Lt : (a == b ? C::Eq : C::Gt); }

Cmp flip(Cmp c) { return static_cast<Cmp>(-static_cast<int>(c)); }

// Calls fn(rank) for every total preorder of k points, rank[i] being the
// block index of point i. Blocks are chosen front to back as non-empty
// subsets of the points not yet placed.
void for_each_preorder(int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> rank(k, -1);
  std::function<void(unsigned, int)> rec = [&](unsigned remaining, int level) {
    if (remaining == 0) {
      fn(rank);
      return;
    }
    for (unsigned sub = remaining; sub != 0; sub = (sub - 1) & remaining) {
      for (int i = 0; i < k; ++i)
        if ((sub >> i) & 1u) rank[i] = level;
      rec(remaining & ~sub, level + 1);
    }
    for (int i = 0; i < k; ++i)
      if ((remaining >> i) & 1u) rank[i] = -1;
  };
  rec((1u << k) - 1, 0);
}

Signature signature(int x1, int x2, int y1, int y2) {
  return {cmp(x1, y1), cmp(x1, y2), cmp(x2, y1), cmp(x2, y2)};
}

}  // namespace

Signature encode(RelType r) {
  switch (r) {
    case RelType::Before: return {C::Lt, C::Lt, C::Lt, C::Lt};
    case RelType::After: return {C::Gt, C::Gt, C::Gt, C::Gt};
    case RelType::IBefore: return {C::Lt, C::Lt, C::Eq, C::Lt};
    case RelType::IAfter: return {C::Gt, C::Eq, C::Gt, C::Gt};
    case RelType::Includes:
    case RelType::DuringInv: return {C::Lt, C::Lt, C::Gt, C::Gt};
    case RelType::IsIncluded:
    case RelType::During: return {C::Gt, C::Lt, C::Gt, C::Lt};
    case RelType::Begins: return {C::Eq, C::Lt, C::Gt, C::Lt};
    case RelType::BegunBy: return {C::Eq, C::Lt, C::Gt, C::Gt};
    case RelType::Ends: return {C::Gt, C::Lt, C::Gt, C::Eq};
    case RelType::EndedBy: return {C::Lt, C::Lt, C::Gt, C::Eq};
    case RelType::Simultaneous:
    case RelType::Identity: return {C::Eq, C::Lt, C::Gt, C::Eq};
    case RelType::None: break;
  }
  throw std::invalid_argument("NONE has no endpoint encoding");
}

std::optional<RelType> decode(const Signature& s) {
  static const RelType kReps[] = {
      RelType::Before,  RelType::After,    RelType::IBefore,
      RelType::IAfter,  RelType::Includes, RelType::IsIncluded,
      RelType::Begins,  RelType::BegunBy,  RelType::Ends,
      RelType::EndedBy, RelType::Simultaneous};
  for (RelType r : kReps)
    if (encode(r) == s) return r;
  return std::nullopt;
}

RelType invert_by_endpoints(RelType r) {
  const Signature s = encode(r);
  // Y relative to X: (y1?x1, y1?x2, y2?x1, y2?x2).
  const Signature swapped = {flip(s[0]), flip(s[2]), flip(s[1]), flip(s[3])};
  return decode(swapped).value();
}

RelSet compose_by_preorders(RelType a, RelType b) {
  const Signature sa = encode(a), sb = encode(b);
  RelSet out;
  // Points: x1 x2 y1 y2 z1 z2.
  for_each_preorder(6, [&](const std::vector<int>& p) {
    if (!(p[0] < p[1] && p[2] < p[3] && p[4] < p[5])) return;
    if (signature(p[0], p[1], p[2], p[3]) != sa) return;
    if (signature(p[2], p[3], p[4], p[5]) != sb) return;
    if (auto c = decode(signature(p[0], p[1], p[4], p[5]))) out.insert(*c);
  });
  return out;
}

std::size_t preorder_count() {
  std::size_t n = 0;
  for_each_preorder(6, [&](const std::vector<int>&) { ++n; });
  return n;
}

bool realisable(int n, const std::vector<Edge>& edges) {
  if (n > 4) throw std::invalid_argument("realisable: at most 4 intervals");
  bool found = false;
  for_each_preorder(2 * n, [&](const std::vector<int>& p) {
    if (found) return;
    for (int i = 0; i < n; ++i)
      if (p[2 * i] >= p[2 * i + 1]) return;
    for (const Edge& e : edges) {
      const Signature s = signature(p[2 * e.p], p[2 * e.p + 1], p[2 * e.q],
                                    p[2 * e.q + 1]);
      if (s != encode(e.rel)) return;
    }
    found = true;
  });
  return found;
}

BinaryProgram random_program(std::mt19937_64& rng, std::size_t max_arcs,
                             bool strict) {
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::size_t n_nodes = 3 + below(3);
  std::vector<EntityRef> nodes;
  for (std::size_t k = 0; k < n_nodes; ++k)
    nodes.push_back({EntityKind::EventInstance, "e" + std::to_string(k), "rnd"});

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n_nodes; ++a)
    for (std::size_t b = a + 1; b < n_nodes; ++b) pairs.emplace_back(a, b);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const std::size_t n_arcs = 1 + below(std::min(max_arcs, pairs.size()));
  pairs.resize(n_arcs);

  // Two to four classifiers with weights k/16 vote on random subsets.
  const std::size_t n_runs = 2 + below(3);
  std::vector<ClassifierRun> runs(n_runs);
  for (std::size_t c = 0; c < n_runs; ++c) {
    runs[c].name = "c" + std::to_string(c);
    runs[c].f1_weight = static_cast<double>(1 + below(16)) / 16.0;
    auto& links = runs[c].documents["rnd"];
    for (const auto& [a, b] : pairs) {
      if (c != 0 && below(3) == 0) continue;
      const RelType r = static_cast<RelType>(1 + below(kNumProperLabels));
      if (below(2)) links.push_back({nodes[a], nodes[b], r, ""});
      else links.push_back({nodes[b], nodes[a], invert(r), ""});
    }
  }
  ModelOptions options;
  options.none_breaks_triangles = strict;
  if (strict && below(3) == 0) options.voted_labels_only = true;
  if (below(4) == 0) options.none_weight = static_cast<double>(below(8)) / 32.0;
  const VoteTable votes = collect_arcs(runs, "rnd", options);

  std::vector<Triangle> triangles = enumerate_triangles(votes.arcs);
  // Extra triples over arbitrary arcs with random orientation flags.
  if (votes.arcs.size() >= 3) {
    const std::size_t extra = below(3);
    for (std::size_t k = 0; k < extra; ++k) {
      Triangle t;
      t.pq = below(votes.arcs.size());
      do t.qr = below(votes.arcs.size()); while (t.qr == t.pq);
      do t.pr = below(votes.arcs.size()); while (t.pr == t.pq || t.pr == t.qr);
      t.pq_forward = below(2);
      t.qr_forward = below(2);
      t.pr_forward = below(2);
      triangles.push_back(t);
    }
  }
  return build_ip(votes, triangles, CompositionTable::instance(), options);
}

std::vector<TLink> random_consistent_links(std::mt19937_64& rng, int nodes,
                                           double density,
                                           const std::string& doc) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<int, int>> iv;
  for (int k = 0; k < nodes; ++k) {
    const int s = static_cast<int>(rng() % (nodes + 2));
    iv.emplace_back(s, s + 1 + static_cast<int>(rng() % 4));
  }
  auto ent = [&](int k) {
    return EntityRef{EntityKind::EventInstance, "ei" + std::to_string(k), doc};
  };
  std::vector<TLink> links;
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j) {
      if (unit(rng) >= density) continue;
      auto r = decode(signature(iv[i].first, iv[i].second, iv[j].first, iv[j].second));
      if (!r) continue;
      RelType rel = *r;
      if (rng() % 3 == 0) {
        if (rel == RelType::Simultaneous) rel = RelType::Identity;
        if (rel == RelType::IsIncluded) rel = RelType::During;
        if (rel == RelType::Includes) rel = RelType::DuringInv;
      }
      if (rng() % 2)
        links.push_back({ent(i), ent(j), rel, ""});
      else
        links.push_back({ent(j), ent(i), invert(rel), ""});
    }
  return links;
}

}  // namespace tempens::oracle
