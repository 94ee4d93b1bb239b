#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tempens/entity.hpp"
#include "tempens/relation_algebra.hpp"

namespace tempens {

// Bad or missing configuration (weights, ensemble members, splits).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class XmlParseError : public DataError {
 public:
  XmlParseError(const std::string& what, long line, long column)
      : DataError(what), line_(line), column_(column) {}
  long line() const { return line_; }
  long column() const { return column_; }

 private:
  long line_;
  long column_;
};

struct TLink {
  EntityRef source;
  EntityRef target;
  RelType rel = RelType::None;
  std::string lid;
};

// One entry of the skipped-items report.
struct SkippedItem {
  std::string document;
  std::string item;    // lid, or "#<index>" when the TLINK has no lid
  std::string reason;  // single token, e.g. "unknown-reltype:OVERLAP"
};

struct TimemlDocument {
  std::string id;
  std::vector<EntityRef> entities;
  std::vector<TLink> links;
  std::vector<SkippedItem> skipped;
  std::size_t tlink_elements = 0;
};

// Parses the TIMEX3 / MAKEINSTANCE / TLINK subset of a TimeML document.
// Throws XmlParseError on malformed XML.
TimemlDocument parse_timeml(std::string_view text, const std::string& doc_id);
TimemlDocument parse_timeml_file(const std::filesystem::path& path,
                                 const std::string& doc_id);

// Writes a minimal TimeML document holding the given entities and links.
// parse_timeml(write_timeml(d)) reproduces d's entities and links.
void write_timeml(std::ostream& out, const std::string& doc_id,
                  const std::vector<EntityRef>& entities,
                  const std::vector<TLink>& links);

// Unordered entity pair in its canonical direction (lo < hi).
struct CanonicalArc {
  EntityRef lo;
  EntityRef hi;

  const std::string& document() const { return lo.document; }
  friend bool operator==(const CanonicalArc&, const CanonicalArc&) = default;
  friend auto operator<=>(const CanonicalArc&, const CanonicalArc&) = default;
};

// Orients a link along its canonical arc, inverting the label if the
// endpoints had to be swapped. Requires source != target.
std::pair<CanonicalArc, RelType> canonicalize(const TLink& link);

struct ClassifierRun {
  std::string name;
  double f1_weight = 0.0;
  // document id -> links
  std::map<std::string, std::vector<TLink>> documents;
  // document id -> entities declared in that document
  std::map<std::string, std::vector<EntityRef>> entities;
};

// "<name> <weight>" per line, '#' starts a comment.
std::map<std::string, double> parse_weights(std::istream& in);
std::map<std::string, double> load_weights(const std::filesystem::path& path);

struct Corpus {
  ClassifierRun reference;
  std::map<std::string, ClassifierRun> runs;
  std::vector<SkippedItem> skipped;
  std::vector<std::string> warnings;

  std::vector<std::string> document_ids() const;
};

// Reads runs/<classifier>/<doc>.tml and reference/<doc>.tml under root.
// Every classifier directory needs a weights entry (ConfigError otherwise).
// Later duplicates of a TLINK on the same entity pair replace earlier ones.
Corpus load_corpus(const std::filesystem::path& root,
                   const std::map<std::string, double>& weights);

// Loads one directory of <doc>.tml files as a run.
ClassifierRun load_run_directory(const std::filesystem::path& dir,
                                 const std::string& name, double weight,
                                 std::vector<SkippedItem>& skipped,
                                 std::vector<std::string>& warnings);

void write_skipped_report(std::ostream& out,
                          const std::vector<SkippedItem>& items);

}  // namespace tempens
