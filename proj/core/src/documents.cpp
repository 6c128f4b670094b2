#include "goalforge/documents.hpp"

#include <nlohmann/json.hpp>

#include <set>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

using nlohmann::json;

namespace {

std::string type_name(const json& j) {
  if (j.is_number_integer()) return "integer";
  return j.type_name();
}

// Field access with exact-name checking. `path` is the document path of `obj`.
class Fields {
 public:
  Fields(const json& obj, std::string path, std::set<std::string> allowed) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw Error::schema_violation(display(path_), "expected object, got " + type_name(obj_));
    for (const auto& [key, _] : obj_.items()) {
      if (!allowed.contains(key)) throw Error::schema_violation(child(key), "unknown field");
    }
    for (const auto& key : allowed) {
      if (!obj_.contains(key)) throw Error::schema_violation(child(key), "missing field");
    }
  }

  std::string string(const std::string& key) const {
    const json& v = obj_.at(key);
    if (!v.is_string()) throw Error::schema_violation(child(key), "expected string, got " + type_name(v));
    return v.get<std::string>();
  }

  long long integer(const std::string& key) const { return as_integer(obj_.at(key), child(key)); }

  const json& array(const std::string& key) const {
    const json& v = obj_.at(key);
    if (!v.is_array()) throw Error::schema_violation(child(key), "expected array, got " + type_name(v));
    return v;
  }

  std::vector<std::string> strings(const std::string& key) const {
    std::vector<std::string> out;
    const json& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) {
        throw Error::schema_violation(index(key, i), "expected string, got " + type_name(arr[i]));
      }
      out.push_back(arr[i].get<std::string>());
    }
    return out;
  }

  std::vector<long long> integers(const std::string& key) const {
    std::vector<long long> out;
    const json& arr = array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_integer(arr[i], index(key, i)));
    return out;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string index(const std::string& key, std::size_t i) const {
    return child(key) + "[" + std::to_string(i) + "]";
  }

 private:
  static std::string display(const std::string& path) { return path.empty() ? "$" : path; }

  static long long as_integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      const auto rounded = static_cast<long long>(d);
      if (static_cast<double>(rounded) == d) return rounded;
    }
    throw Error::schema_violation(path, "expected integer, got " + type_name(v));
  }

  const json& obj_;
  std::string path_;
};

// Scans for a balanced {...} span starting at `open`, honouring JSON strings.
std::size_t balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

std::optional<json> try_object(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

json extract_json_object(std::string_view raw) {
  // Fenced blocks first: ``` optionally followed by a language tag.
  std::size_t pos = 0;
  while ((pos = raw.find("```", pos)) != std::string_view::npos) {
    const auto body_start = raw.find('\n', pos + 3);
    if (body_start == std::string_view::npos) break;
    const auto close = raw.find("```", body_start + 1);
    if (close == std::string_view::npos) break;
    if (auto j = try_object(raw.substr(body_start + 1, close - body_start - 1))) return *j;
    pos = close + 3;
  }
  for (std::size_t open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto end = balanced_end(raw, open);
    if (end == std::string_view::npos) continue;
    if (auto j = try_object(raw.substr(open, end - open + 1))) return *j;
  }
  throw Error(Errc::Unparseable, "reply contains no JSON object");
}

AnnotationDoc annotation_from_json(const json& j) {
  Fields f(j, "", {"title", "description", "core_value", "key_words", "qa", "sdg_types"});
  AnnotationDoc doc;
  doc.title = f.string("title");
  doc.description = f.string("description");
  doc.core_value = f.string("core_value");
  doc.key_words = f.strings("key_words");
  const json& qa = f.array("qa");
  for (std::size_t i = 0; i < qa.size(); ++i) {
    Fields q(qa[i], f.index("qa", i), {"question", "answer"});
    doc.qa.push_back({q.string("question"), q.string("answer")});
  }
  doc.sdg_types = f.integers("sdg_types");
  return doc;
}

KgDoc kg_from_json(const json& j) {
  Fields f(j, "", {"nodes", "links"});
  KgDoc doc;
  const json& nodes = f.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Fields n(nodes[i], f.index("nodes", i), {"id", "order", "details"});
    doc.nodes.push_back({n.string("id"), n.integer("order"), n.string("details")});
  }
  const json& links = f.array("links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    Fields l(links[i], f.index("links", i), {"source", "target", "relation"});
    doc.links.push_back({l.string("source"), l.string("target"), l.string("relation")});
  }
  return doc;
}

NewGoalsDoc new_goals_from_json(const json& j) {
  Fields top(j, "", {"results"});
  Fields f(j.at("results"), "results", {"relationships", "new_goals"});
  NewGoalsDoc doc;
  const json& rels = f.array("relationships");
  for (std::size_t i = 0; i < rels.size(); ++i) {
    Fields r(rels[i], f.index("relationships", i), {"goals", "relation", "source"});
    doc.relationships.push_back({r.integers("goals"), r.string("relation"), r.string("source")});
  }
  const json& goals = f.array("new_goals");
  for (std::size_t i = 0; i < goals.size(); ++i) {
    Fields g(goals[i], f.index("new_goals", i), {"goal", "sub_goals", "source", "description"});
    NewGoalEntry entry;
    entry.goal = g.string("goal");
    entry.source = g.string("source");
    entry.description = g.string("description");
    const json& subs = g.array("sub_goals");
    for (std::size_t k = 0; k < subs.size(); ++k) {
      Fields s(subs[k], g.index("sub_goals", k), {"code", "description", "indicators"});
      SubGoalEntry sub{s.string("code"), s.string("description"), {}};
      const json& inds = s.array("indicators");
      for (std::size_t m = 0; m < inds.size(); ++m) {
        Fields ind(inds[m], s.index("indicators", m), {"code", "description"});
        sub.indicators.push_back({ind.string("code"), ind.string("description")});
      }
      entry.sub_goals.push_back(std::move(sub));
    }
    doc.new_goals.push_back(std::move(entry));
  }
  return doc;
}

AnnotationDoc parse_annotation_doc(std::string_view raw) { return annotation_from_json(extract_json_object(raw)); }
KgDoc parse_kg_doc(std::string_view raw) { return kg_from_json(extract_json_object(raw)); }
NewGoalsDoc parse_new_goals_doc(std::string_view raw) { return new_goals_from_json(extract_json_object(raw)); }

StructuredDoc parse_structured(std::string_view raw, DocSchema schema) {
  if (trim(raw).empty()) throw Error(Errc::Unparseable, "empty reply");
  switch (schema) {
    case DocSchema::AnnotationDoc: return parse_annotation_doc(raw);
    case DocSchema::KgDoc: return parse_kg_doc(raw);
    case DocSchema::NewGoalsDoc: return parse_new_goals_doc(raw);
  }
  throw Error(Errc::InvalidArgument, "unknown schema");
}

json to_json(const AnnotationDoc& doc) {
  json qa = json::array();
  for (const auto& p : doc.qa) qa.push_back({{"question", p.question}, {"answer", p.answer}});
  return {{"title", doc.title},         {"description", doc.description}, {"core_value", doc.core_value},
          {"key_words", doc.key_words}, {"qa", qa},                       {"sdg_types", doc.sdg_types}};
}

json to_json(const KgDoc& doc) {
  json nodes = json::array();
  for (const auto& n : doc.nodes) nodes.push_back({{"id", n.id}, {"order", n.order}, {"details", n.details}});
  json links = json::array();
  for (const auto& l : doc.links) links.push_back({{"source", l.source}, {"target", l.target}, {"relation", l.relation}});
  return {{"nodes", nodes}, {"links", links}};
}

json to_json(const NewGoalsDoc& doc) {
  json rels = json::array();
  for (const auto& r : doc.relationships) {
    rels.push_back({{"goals", r.goals}, {"relation", r.relation}, {"source", r.source}});
  }
  json goals = json::array();
  for (const auto& g : doc.new_goals) {
    json subs = json::array();
    for (const auto& s : g.sub_goals) {
      json inds = json::array();
      for (const auto& i : s.indicators) inds.push_back({{"code", i.code}, {"description", i.description}});
      subs.push_back({{"code", s.code}, {"description", s.description}, {"indicators", inds}});
    }
    goals.push_back({{"goal", g.goal}, {"sub_goals", subs}, {"source", g.source}, {"description", g.description}});
  }
  return {{"results", {{"relationships", rels}, {"new_goals", goals}}}};
}

std::string serialize(const AnnotationDoc& doc) { return dump_json(to_json(doc)); }
std::string serialize(const KgDoc& doc) { return dump_json(to_json(doc)); }
std::string serialize(const NewGoalsDoc& doc) { return dump_json(to_json(doc)); }

std::string dump_json(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace); }

std::string fenced(const std::string& json_text) { return "```json\n" + json_text + "\n```"; }

}  // namespace goalforge
