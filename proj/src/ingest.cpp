#include "tempens/ingest.hpp"

#include <expat.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace tempens {

namespace {

struct RawTLink {
  std::string lid;
  std::string rel;
  std::string source_event, source_time;
  std::string target_event, target_time;
};

struct ParseState {
  std::string doc_id;
  std::vector<EntityRef> entities;
  std::set<std::string> timex_ids;
  std::string dct_id;
  std::set<std::string> instance_ids;
  std::vector<RawTLink> tlinks;
};

const char* find_attr(const XML_Char** attrs, std::string_view name) {
  for (int i = 0; attrs[i] != nullptr; i += 2)
    if (name == attrs[i]) return attrs[i + 1];
  return nullptr;
}

std::string attr_or_empty(const XML_Char** attrs, std::string_view name) {
  const char* v = find_attr(attrs, name);
  return v ? std::string(v) : std::string();
}

void XMLCALL on_start(void* user, const XML_Char* name,
                      const XML_Char** attrs) {
  auto& st = *static_cast<ParseState*>(user);
  const std::string_view tag(name);
  if (tag == "TIMEX3") {
    std::string tid = attr_or_empty(attrs, "tid");
    if (tid.empty() || st.timex_ids.count(tid)) return;
    const bool dct = attr_or_empty(attrs, "functionInDocument") ==
                     "CREATION_TIME";
    if (dct && st.dct_id.empty()) st.dct_id = tid;
    st.timex_ids.insert(tid);
    st.entities.push_back(
        {dct ? EntityKind::Dct : EntityKind::Timex, tid, st.doc_id});
  } else if (tag == "MAKEINSTANCE") {
    std::string eiid = attr_or_empty(attrs, "eiid");
    if (eiid.empty() || st.instance_ids.count(eiid)) return;
    st.instance_ids.insert(eiid);
    st.entities.push_back({EntityKind::EventInstance, eiid, st.doc_id});
  } else if (tag == "TLINK") {
    RawTLink raw;
    raw.lid = attr_or_empty(attrs, "lid");
    raw.rel = attr_or_empty(attrs, "relType");
    raw.source_event = attr_or_empty(attrs, "eventInstanceID");
    raw.source_time = attr_or_empty(attrs, "timeID");
    raw.target_event = attr_or_empty(attrs, "relatedToEventInstance");
    raw.target_time = attr_or_empty(attrs, "relatedToTime");
    st.tlinks.push_back(std::move(raw));
  }
}

void XMLCALL on_end(void*, const XML_Char*) {}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

TimemlDocument parse_timeml(std::string_view text, const std::string& doc_id) {
  ParseState st;
  st.doc_id = doc_id;

  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(
      XML_ParserCreate("UTF-8"));
  if (!parser) throw std::bad_alloc();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()),
                XML_TRUE) == XML_STATUS_ERROR) {
    const long line = static_cast<long>(XML_GetCurrentLineNumber(parser.get()));
    const long col =
        static_cast<long>(XML_GetCurrentColumnNumber(parser.get())) + 1;
    std::ostringstream msg;
    msg << doc_id << ":" << line << ":" << col << ": "
        << XML_ErrorString(XML_GetErrorCode(parser.get()));
    throw XmlParseError(msg.str(), line, col);
  }

  TimemlDocument doc;
  doc.id = doc_id;
  doc.entities = std::move(st.entities);
  doc.tlink_elements = st.tlinks.size();

  auto resolve = [&](const std::string& event, const std::string& time,
                     std::string& missing) -> std::optional<EntityRef> {
    if (!event.empty()) {
      if (st.instance_ids.count(event))
        return EntityRef{EntityKind::EventInstance, event, doc_id};
      missing = event;
      return std::nullopt;
    }
    if (!time.empty()) {
      if (st.timex_ids.count(time))
        return EntityRef{time == st.dct_id ? EntityKind::Dct : EntityKind::Timex,
                         time, doc_id};
      missing = time;
      return std::nullopt;
    }
    missing = "?";
    return std::nullopt;
  };

  for (std::size_t i = 0; i < st.tlinks.size(); ++i) {
    const RawTLink& raw = st.tlinks[i];
    const std::string item =
        raw.lid.empty() ? "#" + std::to_string(i) : raw.lid;
    auto skip = [&](std::string reason) {
      doc.skipped.push_back({doc_id, item, std::move(reason)});
    };

    const auto rel = parse_rel_type(raw.rel);
    if (!rel || *rel == RelType::None) {
      skip("unknown-reltype:" + (raw.rel.empty() ? std::string("?") : raw.rel));
      continue;
    }
    std::string missing;
    auto source = resolve(raw.source_event, raw.source_time, missing);
    if (!source) {
      skip("dangling-endpoint:" + missing);
      continue;
    }
    auto target = resolve(raw.target_event, raw.target_time, missing);
    if (!target) {
      skip("dangling-endpoint:" + missing);
      continue;
    }
    if (*source == *target) {
      skip("self-loop:" + source->id);
      continue;
    }
    doc.links.push_back({std::move(*source), std::move(*target), *rel, raw.lid});
  }
  return doc;
}

TimemlDocument parse_timeml_file(const std::filesystem::path& path,
                                 const std::string& doc_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_timeml(buf.str(), doc_id);
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_timeml(std::ostream& out, const std::string& doc_id,
                  const std::vector<EntityRef>& entities,
                  const std::vector<TLink>& links) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<TimeML>\n";
  out << "<DOCID>" << xml_escape(doc_id) << "</DOCID>\n";
  std::set<EntityRef> declared(entities.begin(), entities.end());
  for (const auto& link : links) {
    declared.insert(link.source);
    declared.insert(link.target);
  }
  for (const auto& e : declared) {
    if (e.kind == EntityKind::EventInstance) continue;
    out << "<TIMEX3 tid=\"" << xml_escape(e.id) << "\"";
    if (e.kind == EntityKind::Dct)
      out << " functionInDocument=\"CREATION_TIME\"";
    out << "/>\n";
  }
  for (const auto& e : declared) {
    if (e.kind != EntityKind::EventInstance) continue;
    out << "<MAKEINSTANCE eiid=\"" << xml_escape(e.id) << "\"/>\n";
  }
  std::size_t n = 0;
  for (const auto& link : links) {
    ++n;
    const std::string lid = link.lid.empty() ? "l" + std::to_string(n) : link.lid;
    out << "<TLINK lid=\"" << xml_escape(lid) << "\" relType=\""
        << to_string(link.rel) << "\" ";
    out << (link.source.kind == EntityKind::EventInstance ? "eventInstanceID"
                                                          : "timeID")
        << "=\"" << xml_escape(link.source.id) << "\" ";
    out << (link.target.kind == EntityKind::EventInstance
                ? "relatedToEventInstance"
                : "relatedToTime")
        << "=\"" << xml_escape(link.target.id) << "\"/>\n";
  }
  out << "</TimeML>\n";
}

std::pair<CanonicalArc, RelType> canonicalize(const TLink& link) {
  if (link.source == link.target)
    throw std::invalid_argument("TLINK endpoints coincide: " + link.source.id);
  if (link.source < link.target)
    return {CanonicalArc{link.source, link.target}, link.rel};
  return {CanonicalArc{link.target, link.source}, invert(link.rel)};
}

std::map<std::string, double> parse_weights(std::istream& in) {
  std::map<std::string, double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    double weight = 0.0;
    std::string rest;
    if (!(fields >> weight) || (fields >> rest))
      throw ConfigError("weights line " + std::to_string(lineno) +
                        ": expected '<classifier> <weight>'");
    if (weight < 0.0)
      throw ConfigError("weights line " + std::to_string(lineno) +
                        ": negative weight for " + name);
    out[name] = weight;
  }
  return out;
}

std::map<std::string, double> load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file " + path.string());
  return parse_weights(in);
}

std::vector<std::string> Corpus::document_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, links] : reference.documents) ids.push_back(id);
  return ids;
}

namespace {

// Keeps the last prediction per unordered entity pair.
std::vector<TLink> dedupe_links(const std::string& run, const std::string& doc,
                                std::vector<TLink> links,
                                std::vector<std::string>& warnings) {
  std::map<CanonicalArc, std::size_t> last;
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto [arc, rel] = canonicalize(links[i]);
    auto [it, inserted] = last.emplace(arc, i);
    if (!inserted) {
      warnings.push_back(run + "/" + doc + ": duplicate TLINK on " +
                         arc.lo.id + "-" + arc.hi.id + ", keeping the last");
      it->second = i;
    }
  }
  std::vector<bool> keep(links.size(), false);
  for (const auto& [arc, i] : last) keep[i] = true;
  std::vector<TLink> out;
  for (std::size_t i = 0; i < links.size(); ++i)
    if (keep[i]) out.push_back(std::move(links[i]));
  return out;
}

std::vector<std::filesystem::path> sorted_tml_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".tml")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

ClassifierRun load_run_directory(const std::filesystem::path& dir,
                                 const std::string& name, double weight,
                                 std::vector<SkippedItem>& skipped,
                                 std::vector<std::string>& warnings) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("not a directory: " + dir.string());
  ClassifierRun run;
  run.name = name;
  run.f1_weight = weight;
  for (const auto& file : sorted_tml_files(dir)) {
    const std::string doc_id = file.stem().string();
    TimemlDocument doc = parse_timeml_file(file, doc_id);
    skipped.insert(skipped.end(), doc.skipped.begin(), doc.skipped.end());
    run.documents[doc_id] =
        dedupe_links(name, doc_id, std::move(doc.links), warnings);
    run.entities[doc_id] = std::move(doc.entities);
  }
  return run;
}

Corpus load_corpus(const std::filesystem::path& root,
                   const std::map<std::string, double>& weights) {
  namespace fs = std::filesystem;
  Corpus corpus;
  const fs::path ref_dir = root / "reference";
  const fs::path runs_dir = root / "runs";
  if (!fs::is_directory(ref_dir))
    throw DataError("missing reference directory " + ref_dir.string());
  if (!fs::is_directory(runs_dir))
    throw DataError("missing runs directory " + runs_dir.string());

  corpus.reference = load_run_directory(ref_dir, "reference", 1.0,
                                        corpus.skipped, corpus.warnings);

  std::vector<fs::path> run_dirs;
  for (const auto& entry : fs::directory_iterator(runs_dir))
    if (entry.is_directory()) run_dirs.push_back(entry.path());
  std::sort(run_dirs.begin(), run_dirs.end());

  for (const auto& dir : run_dirs) {
    const std::string name = dir.filename().string();
    auto w = weights.find(name);
    if (w == weights.end())
      throw ConfigError("no weight given for classifier " + name);
    ClassifierRun run = load_run_directory(dir, name, w->second,
                                           corpus.skipped, corpus.warnings);
    for (const auto& [doc_id, links] : corpus.reference.documents)
      if (!run.documents.count(doc_id))
        corpus.warnings.push_back(name + ": no output for document " + doc_id);
    corpus.runs.emplace(name, std::move(run));
  }
  return corpus;
}

void write_skipped_report(std::ostream& out,
                          const std::vector<SkippedItem>& items) {
  for (const auto& s : items)
    out << s.document << ' ' << s.item << ' ' << s.reason << '\n';
}

}  // namespace tempens
