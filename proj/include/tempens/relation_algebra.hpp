#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tempens/entity.hpp"

namespace tempens {

// The fourteen TimeML relation types plus the artificial NONE label. The
// enumerator values are the 1-based ordinals used for IP variable naming.
enum class RelType : std::uint8_t {
  Before = 1,
  After,
  IBefore,
  IAfter,
  Includes,
  IsIncluded,
  During,
  DuringInv,
  Begins,
  BegunBy,
  Ends,
  EndedBy,
  Simultaneous,
  Identity,
  None,
};

inline constexpr int kNumLabels = 15;
inline constexpr int kNumProperLabels = 14;

constexpr int ordinal(RelType r) { return static_cast<int>(r); }
RelType rel_from_ordinal(int ordinal);

// TimeML spelling, e.g. "IS_INCLUDED".
std::string_view to_string(RelType r);
std::optional<RelType> parse_rel_type(std::string_view name);

// All 15 labels in ordinal order.
const std::array<RelType, kNumLabels>& all_labels();
// The 14 labels other than NONE in ordinal order.
const std::array<RelType, kNumProperLabels>& proper_labels();

RelType invert(RelType r);

// Maps labels that the interval algebra cannot tell apart onto one
// representative: IDENTITY -> SIMULTANEOUS, DURING -> IS_INCLUDED,
// DURING_INV -> INCLUDES. Everything else is returned unchanged.
RelType collapse_synonyms(RelType r);

// A subset of the 14 non-NONE labels, bit (ordinal - 1) per member.
class RelSet {
 public:
  constexpr RelSet() = default;
  static constexpr RelSet from_bits(std::uint16_t bits) {
    return RelSet(static_cast<std::uint16_t>(bits & kAllBits));
  }
  static constexpr RelSet all() { return RelSet(kAllBits); }
  static RelSet of(RelType r);
  static RelSet of(std::initializer_list<RelType> rs);

  constexpr std::uint16_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool full() const { return bits_ == kAllBits; }
  int size() const;
  bool contains(RelType r) const;
  bool is_singleton() const { return size() == 1; }
  // Smallest-ordinal member. Requires a non-empty set.
  RelType first() const;
  std::vector<RelType> members() const;

  RelSet& insert(RelType r);
  RelSet& erase(RelType r);

  // Member-wise converse.
  RelSet inverted() const;
  // Adds IDENTITY next to SIMULTANEOUS, DURING next to IS_INCLUDED and
  // DURING_INV next to INCLUDES (in both directions).
  RelSet saturated() const;
  // Image under collapse_synonyms.
  RelSet collapsed() const;

  friend constexpr RelSet operator|(RelSet a, RelSet b) {
    return RelSet(static_cast<std::uint16_t>(a.bits_ | b.bits_));
  }
  friend constexpr RelSet operator&(RelSet a, RelSet b) {
    return RelSet(static_cast<std::uint16_t>(a.bits_ & b.bits_));
  }
  RelSet& operator|=(RelSet o) { bits_ |= o.bits_; return *this; }
  RelSet& operator&=(RelSet o) { bits_ &= o.bits_; return *this; }
  friend constexpr bool operator==(RelSet, RelSet) = default;
  constexpr bool is_subset_of(RelSet o) const {
    return (bits_ & ~o.bits_) == 0;
  }

  // Comma-separated label names in ordinal order; "" for the empty set.
  std::string to_string() const;

 private:
  static constexpr std::uint16_t kAllBits = (1u << kNumProperLabels) - 1;
  constexpr explicit RelSet(std::uint16_t bits) : bits_(bits) {}
  std::uint16_t bits_ = 0;
};

// Raised when a composition is requested on an empty relation set: the
// network that produced it is already inconsistent.
class InconsistentNetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 14x14 composition table over the TimeML labels. Built once from an
// enumeration of interval endpoint placements and immutable afterwards.
// Results use the collapsed representatives (SIMULTANEOUS, IS_INCLUDED,
// INCLUDES) for synonym groups; Allen overlaps/overlapped-by have no TimeML
// label and never appear in a result.
class CompositionTable {
 public:
  static const CompositionTable& instance();

  // Throws std::invalid_argument if either argument is NONE.
  RelSet compose(RelType a, RelType b) const;

  // Grid dump: a header line with the column labels, then one line per row
  // label; cells are tab-separated and hold comma-separated label names
  // ("-" for an empty cell).
  void dump(std::ostream& out) const;

 private:
  CompositionTable();
  std::array<std::array<RelSet, kNumProperLabels>, kNumProperLabels> table_{};
};

RelSet compose(RelType a, RelType b);
// Union of compose(a, b) over a in sa and b in sb. Throws
// InconsistentNetworkError if either set is empty.
RelSet compose_sets(RelSet sa, RelSet sb);

// A temporal graph over the entities of one document. Each unordered node
// pair holds at most one edge, stored in the direction (lo, hi) with
// lo < hi; reading it the other way yields the inverted set.
class EventGraph {
 public:
  using Node = EntityRef;

  void add_node(const Node& n);
  // Sets the relation read in direction p -> q. Setting NONE or an empty set
  // removes the edge. Throws std::invalid_argument on self-loops.
  void set_relation(const Node& p, const Node& q, RelType r);
  void set_relation(const Node& p, const Node& q, RelSet s);
  // Relation read in direction p -> q, if an edge is stored.
  std::optional<RelSet> relation(const Node& p, const Node& q) const;

  const std::set<Node>& nodes() const { return nodes_; }
  // Keyed by (lo, hi).
  const std::map<std::pair<Node, Node>, RelSet>& edges() const {
    return edges_;
  }
  std::size_t edge_count() const { return edges_.size(); }

  friend bool operator==(const EventGraph&, const EventGraph&) = default;

 private:
  std::set<Node> nodes_;
  std::map<std::pair<Node, Node>, RelSet> edges_;
};

// Path-consistency closure. Pairs with no stored edge start at the full
// set; edges are refined by intersecting with compositions along every
// two-edge path until a fixpoint is reached. Edges whose set stays full are
// not stored. Returns std::nullopt if some edge becomes empty.
std::optional<EventGraph> closure(const EventGraph& g);

// True iff every triangle of single-labelled edges satisfies the
// composition constraint. IDENTITY satisfies any constraint admitting
// SIMULTANEOUS, likewise for the DURING synonyms. Multi-label edges are
// ignored.
bool is_consistent_labeling(const EventGraph& g);

// Graphviz rendering: one node per entity id, one edge per stored arc.
void write_dot(const EventGraph& g, std::ostream& out,
               std::string_view name = "G");

}  // namespace tempens
