#include "tempens/relation_algebra.hpp"

#include <bit>
#include <unordered_map>

namespace tempens {

namespace {

constexpr std::array<std::string_view, kNumLabels> kNames = {
    "BEFORE",   "AFTER",     "IBEFORE",      "IAFTER",   "INCLUDES",
    "IS_INCLUDED", "DURING", "DURING_INV",   "BEGINS",   "BEGUN_BY",
    "ENDS",     "ENDED_BY",  "SIMULTANEOUS", "IDENTITY", "NONE"};

// Allen's thirteen base relations between two intervals.
enum Allen : int {
  kPrecedes,
  kPrecededBy,
  kMeets,
  kMetBy,
  kOverlaps,
  kOverlappedBy,
  kStarts,
  kStartedBy,
  kDuring,
  kContains,
  kFinishes,
  kFinishedBy,
  kEquals,
  kNumAllen,
};

Allen allen_of(int x1, int x2, int y1, int y2) {
  if (x2 < y1) return kPrecedes;
  if (y2 < x1) return kPrecededBy;
  if (x2 == y1) return kMeets;
  if (y2 == x1) return kMetBy;
  if (x1 == y1 && x2 == y2) return kEquals;
  if (x1 == y1) return x2 < y2 ? kStarts : kStartedBy;
  if (x2 == y2) return x1 > y1 ? kFinishes : kFinishedBy;
  if (x1 > y1 && x2 < y2) return kDuring;
  if (x1 < y1 && x2 > y2) return kContains;
  return x1 < y1 ? kOverlaps : kOverlappedBy;
}

Allen to_allen(RelType r) {
  switch (r) {
    case RelType::Before: return kPrecedes;
    case RelType::After: return kPrecededBy;
    case RelType::IBefore: return kMeets;
    case RelType::IAfter: return kMetBy;
    case RelType::Includes:
    case RelType::DuringInv: return kContains;
    case RelType::IsIncluded:
    case RelType::During: return kDuring;
    case RelType::Begins: return kStarts;
    case RelType::BegunBy: return kStartedBy;
    case RelType::Ends: return kFinishes;
    case RelType::EndedBy: return kFinishedBy;
    case RelType::Simultaneous:
    case RelType::Identity: return kEquals;
    case RelType::None: break;
  }
  throw std::invalid_argument("NONE has no interval-algebra counterpart");
}

std::optional<RelType> from_allen(int a) {
  switch (a) {
    case kPrecedes: return RelType::Before;
    case kPrecededBy: return RelType::After;
    case kMeets: return RelType::IBefore;
    case kMetBy: return RelType::IAfter;
    case kStarts: return RelType::Begins;
    case kStartedBy: return RelType::BegunBy;
    case kDuring: return RelType::IsIncluded;
    case kContains: return RelType::Includes;
    case kFinishes: return RelType::Ends;
    case kFinishedBy: return RelType::EndedBy;
    case kEquals: return RelType::Simultaneous;
    default: return std::nullopt;
  }
}

}  // namespace

const char* to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Dct: return "DCT";
    case EntityKind::Timex: return "TIMEX";
    case EntityKind::EventInstance: return "EVENT_INSTANCE";
  }
  return "?";
}

RelType rel_from_ordinal(int ordinal) {
  if (ordinal < 1 || ordinal > kNumLabels)
    throw std::out_of_range("relation ordinal out of range: " +
                            std::to_string(ordinal));
  return static_cast<RelType>(ordinal);
}

std::string_view to_string(RelType r) { return kNames[ordinal(r) - 1]; }

std::optional<RelType> parse_rel_type(std::string_view name) {
  for (int i = 0; i < kNumLabels; ++i)
    if (kNames[i] == name) return static_cast<RelType>(i + 1);
  return std::nullopt;
}

const std::array<RelType, kNumLabels>& all_labels() {
  static const auto labels = [] {
    std::array<RelType, kNumLabels> out{};
    for (int i = 0; i < kNumLabels; ++i) out[i] = static_cast<RelType>(i + 1);
    return out;
  }();
  return labels;
}

const std::array<RelType, kNumProperLabels>& proper_labels() {
  static const auto labels = [] {
    std::array<RelType, kNumProperLabels> out{};
    for (int i = 0; i < kNumProperLabels; ++i)
      out[i] = static_cast<RelType>(i + 1);
    return out;
  }();
  return labels;
}

RelType invert(RelType r) {
  switch (r) {
    case RelType::Before: return RelType::After;
    case RelType::After: return RelType::Before;
    case RelType::IBefore: return RelType::IAfter;
    case RelType::IAfter: return RelType::IBefore;
    case RelType::Includes: return RelType::IsIncluded;
    case RelType::IsIncluded: return RelType::Includes;
    case RelType::During: return RelType::DuringInv;
    case RelType::DuringInv: return RelType::During;
    case RelType::Begins: return RelType::BegunBy;
    case RelType::BegunBy: return RelType::Begins;
    case RelType::Ends: return RelType::EndedBy;
    case RelType::EndedBy: return RelType::Ends;
    case RelType::Simultaneous:
    case RelType::Identity:
    case RelType::None: return r;
  }
  return r;
}

RelType collapse_synonyms(RelType r) {
  switch (r) {
    case RelType::Identity: return RelType::Simultaneous;
    case RelType::During: return RelType::IsIncluded;
    case RelType::DuringInv: return RelType::Includes;
    default: return r;
  }
}

// ---------------------------------------------------------------------------
// RelSet

RelSet RelSet::of(RelType r) { return RelSet().insert(r); }

RelSet RelSet::of(std::initializer_list<RelType> rs) {
  RelSet s;
  for (RelType r : rs) s.insert(r);
  return s;
}

int RelSet::size() const { return std::popcount(bits_); }

bool RelSet::contains(RelType r) const {
  if (r == RelType::None) return false;
  return (bits_ >> (ordinal(r) - 1)) & 1u;
}

RelType RelSet::first() const {
  if (empty()) throw std::logic_error("first() on an empty RelSet");
  return static_cast<RelType>(std::countr_zero(bits_) + 1);
}

std::vector<RelType> RelSet::members() const {
  std::vector<RelType> out;
  for (RelType r : proper_labels())
    if (contains(r)) out.push_back(r);
  return out;
}

RelSet& RelSet::insert(RelType r) {
  if (r == RelType::None)
    throw std::invalid_argument("RelSet cannot hold NONE");
  bits_ |= static_cast<std::uint16_t>(1u << (ordinal(r) - 1));
  return *this;
}

RelSet& RelSet::erase(RelType r) {
  if (r != RelType::None)
    bits_ &= static_cast<std::uint16_t>(~(1u << (ordinal(r) - 1)));
  return *this;
}

RelSet RelSet::inverted() const {
  RelSet out;
  for (RelType r : proper_labels())
    if (contains(r)) out.insert(invert(r));
  return out;
}

RelSet RelSet::collapsed() const {
  RelSet out;
  for (RelType r : proper_labels())
    if (contains(r)) out.insert(collapse_synonyms(r));
  return out;
}

RelSet RelSet::saturated() const {
  RelSet out = *this;
  for (RelType r : proper_labels()) {
    if (!contains(r)) continue;
    RelType rep = collapse_synonyms(r);
    out.insert(rep);
    for (RelType s : proper_labels())
      if (collapse_synonyms(s) == rep) out.insert(s);
  }
  return out;
}

std::string RelSet::to_string() const {
  std::string out;
  for (RelType r : members()) {
    if (!out.empty()) out += ',';
    out += tempens::to_string(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CompositionTable

namespace {

using AllenMask = std::uint16_t;
using AllenTable = std::array<std::array<AllenMask, kNumAllen>, kNumAllen>;

// Base-relation composition over all thirteen Allen relations.
const AllenTable& allen_table() {
  static const AllenTable table = [] {
    // Every arrangement of three intervals is realised by endpoints drawn
    // from six distinct slots, so enumerating {0..5}^6 visits every
    // configuration.
    constexpr int kSlots = 6;
    AllenTable t{};
    for (int x1 = 0; x1 < kSlots; ++x1)
      for (int x2 = x1 + 1; x2 < kSlots; ++x2)
        for (int y1 = 0; y1 < kSlots; ++y1)
          for (int y2 = y1 + 1; y2 < kSlots; ++y2)
            for (int z1 = 0; z1 < kSlots; ++z1)
              for (int z2 = z1 + 1; z2 < kSlots; ++z2) {
                const Allen xy = allen_of(x1, x2, y1, y2);
                const Allen yz = allen_of(y1, y2, z1, z2);
                const Allen xz = allen_of(x1, x2, z1, z2);
                t[xy][yz] |= static_cast<AllenMask>(1u << xz);
              }
    return t;
  }();
  return table;
}

}  // namespace

CompositionTable::CompositionTable() {
  const AllenTable& allen = allen_table();
  for (RelType a : proper_labels()) {
    for (RelType b : proper_labels()) {
      RelSet cell;
      const std::uint16_t mask = allen[to_allen(a)][to_allen(b)];
      for (int c = 0; c < kNumAllen; ++c)
        if ((mask >> c) & 1u)
          if (auto label = from_allen(c)) cell.insert(*label);
      table_[ordinal(a) - 1][ordinal(b) - 1] = cell;
    }
  }
}

const CompositionTable& CompositionTable::instance() {
  static const CompositionTable table;
  return table;
}

RelSet CompositionTable::compose(RelType a, RelType b) const {
  if (a == RelType::None || b == RelType::None)
    throw std::invalid_argument("composition with NONE is undefined");
  return table_[ordinal(a) - 1][ordinal(b) - 1];
}

void CompositionTable::dump(std::ostream& out) const {
  out << "compose";
  for (RelType b : proper_labels()) out << '\t' << to_string(b);
  out << '\n';
  for (RelType a : proper_labels()) {
    out << to_string(a);
    for (RelType b : proper_labels()) {
      const RelSet cell = compose(a, b);
      out << '\t' << (cell.empty() ? std::string("-") : cell.to_string());
    }
    out << '\n';
  }
}

RelSet compose(RelType a, RelType b) {
  return CompositionTable::instance().compose(a, b);
}

RelSet compose_sets(RelSet sa, RelSet sb) {
  if (sa.empty() || sb.empty())
    throw InconsistentNetworkError("composition of an empty relation set");
  const auto& table = CompositionTable::instance();
  RelSet out;
  for (RelType a : sa.members())
    for (RelType b : sb.members()) out |= table.compose(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// EventGraph

void EventGraph::add_node(const Node& n) { nodes_.insert(n); }

void EventGraph::set_relation(const Node& p, const Node& q, RelType r) {
  if (r == RelType::None) {
    set_relation(p, q, RelSet());
    return;
  }
  set_relation(p, q, RelSet::of(r));
}

void EventGraph::set_relation(const Node& p, const Node& q, RelSet s) {
  if (p == q) throw std::invalid_argument("self-loop on " + p.id);
  nodes_.insert(p);
  nodes_.insert(q);
  const bool forward = p < q;
  auto key = forward ? std::make_pair(p, q) : std::make_pair(q, p);
  if (s.empty()) {
    edges_.erase(key);
    return;
  }
  edges_[std::move(key)] = forward ? s : s.inverted();
}

std::optional<RelSet> EventGraph::relation(const Node& p,
                                           const Node& q) const {
  const bool forward = p < q;
  auto it = edges_.find(forward ? std::make_pair(p, q) : std::make_pair(q, p));
  if (it == edges_.end()) return std::nullopt;
  return forward ? it->second : it->second.inverted();
}

// ---------------------------------------------------------------------------
// Closure

namespace {

constexpr AllenMask kAllAllen = (1u << kNumAllen) - 1;
constexpr AllenMask kOverlapBits = (1u << kOverlaps) | (1u << kOverlappedBy);

AllenMask allen_mask(RelSet s) {
  AllenMask m = 0;
  for (RelType r : s.members()) m |= static_cast<AllenMask>(1u << to_allen(r));
  return m;
}

// Converse: the enumerators come in (relation, converse) pairs, then equals.
AllenMask allen_converse(AllenMask m) {
  const AllenMask pairs = m & ((1u << kEquals) - 1);
  const AllenMask swapped = static_cast<AllenMask>(((pairs & 0x0555u) << 1) |
                                                   ((pairs & 0x0AAAu) >> 1));
  return static_cast<AllenMask>(swapped | (m & (1u << kEquals)));
}

// TimeML labels of a mask, synonyms included. Overlap bits have no label.
RelSet labels_of(AllenMask m) {
  RelSet out;
  for (int c = 0; c < kNumAllen; ++c)
    if ((m >> c) & 1u)
      if (auto label = from_allen(c)) out.insert(*label);
  return out.saturated();
}

// Memoised set composition; the closure loop asks for the same few set pairs
// over and over.
class ComposeCache {
 public:
  AllenMask operator()(AllenMask a, AllenMask b) {
    const std::uint32_t key = (std::uint32_t{a} << 16) | b;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const AllenTable& table = allen_table();
    AllenMask out = 0;
    for (int x = 0; x < kNumAllen && out != kAllAllen; ++x) {
      if (!((a >> x) & 1u)) continue;
      for (int y = 0; y < kNumAllen; ++y)
        if ((b >> y) & 1u) out |= table[x][y];
    }
    cache_.emplace(key, out);
    return out;
  }

 private:
  std::unordered_map<std::uint32_t, AllenMask> cache_;
};

}  // namespace

// The fixpoint is computed over all thirteen Allen relations: a pair whose
// only possible relation is an overlap is consistent even though TimeML
// cannot name it. Such pairs stay unstored in the result.
std::optional<EventGraph> closure(const EventGraph& g) {
  const std::vector<EntityRef> nodes(g.nodes().begin(), g.nodes().end());
  const std::size_t n = nodes.size();
  std::map<EntityRef, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(nodes[i], i);

  std::vector<AllenMask> m(n * n, kAllAllen);
  auto at = [&](std::size_t i, std::size_t j) -> AllenMask& { return m[i * n + j]; };
  for (const auto& [key, set] : g.edges()) {
    const std::size_t i = index.at(key.first), j = index.at(key.second);
    if (set.empty()) return std::nullopt;
    at(i, j) = allen_mask(set);
    at(j, i) = allen_converse(at(i, j));
  }

  ComposeCache compose_cached;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (q == p || at(p, q) == kAllAllen) continue;
        const AllenMask pq = at(p, q);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q || at(q, r) == kAllAllen) continue;
          const AllenMask refined = at(p, r) & compose_cached(pq, at(q, r));
          if (refined == at(p, r)) continue;
          if (refined == 0) return std::nullopt;
          at(p, r) = refined;
          at(r, p) = allen_converse(refined);
          changed = true;
        }
      }
    }
  }

  EventGraph out;
  for (const auto& node : nodes) out.add_node(node);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (at(i, j) & kOverlapBits) continue;
      RelSet set = labels_of(at(i, j));
      // Keep the synonym choice of an input edge.
      if (auto given = g.relation(nodes[i], nodes[j])) set &= *given;
      if (!set.full()) out.set_relation(nodes[i], nodes[j], set);
    }
  }
  return out;
}

bool is_consistent_labeling(const EventGraph& g) {
  // Adjacency over single-labelled edges, forward direction only.
  std::map<EntityRef, std::map<EntityRef, RelType>> forward;
  for (const auto& [key, set] : g.edges())
    if (set.is_singleton()) forward[key.first][key.second] = set.first();

  for (const auto& [p, out_p] : forward) {
    for (const auto& [q, pq] : out_p) {
      auto it_q = forward.find(q);
      if (it_q == forward.end()) continue;
      for (const auto& [r, qr] : it_q->second) {
        auto it_pr = out_p.find(r);
        if (it_pr == out_p.end()) continue;
        if (!compose(pq, qr).saturated().contains(it_pr->second)) return false;
      }
    }
  }
  return true;
}

void write_dot(const EventGraph& g, std::ostream& out, std::string_view name) {
  out << "digraph \"" << name << "\" {\n";
  for (const auto& n : g.nodes()) {
    out << "  \"" << n.id << "\"";
    if (n.kind != EntityKind::EventInstance)
      out << " [shape=box]";
    out << ";\n";
  }
  for (const auto& [key, set] : g.edges())
    out << "  \"" << key.first.id << "\" -> \"" << key.second.id
        << "\" [label=\"" << set.to_string() << "\"];\n";
  out << "}\n";
}

}  // namespace tempens
