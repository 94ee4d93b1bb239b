#pragma once

#include <compare>
#include <string>
#include <tuple>

namespace tempens {

// Ordered by rank: the document creation time sorts first, then time
// expressions, then event instances.
enum class EntityKind : int { Dct = 0, Timex = 1, EventInstance = 2 };

const char* to_string(EntityKind kind);

// An annotated entity in one document: an event instance (eiid) or a time
// expression (tid).
struct EntityRef {
  EntityKind kind = EntityKind::EventInstance;
  std::string id;
  std::string document;

  friend bool operator==(const EntityRef&, const EntityRef&) = default;
  friend std::strong_ordering operator<=>(const EntityRef& a,
                                          const EntityRef& b) {
    return std::tie(a.kind, a.id, a.document) <=>
           std::tie(b.kind, b.id, b.document);
  }
};

}  // namespace tempens
