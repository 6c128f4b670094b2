#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace goalforge {

// Structured documents exchanged with the generation provider. Parsing is
// structural only: field names and JSON types are checked strictly, while
// semantic rules (Q&A cardinality, goal ranges, link integrity) belong to the
// stage that consumes the document.

struct QaPair {
  std::string question;
  std::string answer;
  bool operator==(const QaPair&) const = default;
};

struct AnnotationDoc {
  std::string title;
  std::string description;
  std::string core_value;
  std::vector<std::string> key_words;
  std::vector<QaPair> qa;
  std::vector<long long> sdg_types;
  bool operator==(const AnnotationDoc&) const = default;
};

struct KgNode {
  std::string id;
  long long order = 0;
  std::string details;
  bool operator==(const KgNode&) const = default;
};

struct KgLink {
  std::string source;
  std::string target;
  std::string relation;
  bool operator==(const KgLink&) const = default;
};

struct KgDoc {
  std::vector<KgNode> nodes;
  std::vector<KgLink> links;
  bool operator==(const KgDoc&) const = default;
};

struct Relationship {
  std::vector<long long> goals;
  std::string relation;
  std::string source;
  bool operator==(const Relationship&) const = default;
};

struct IndicatorEntry {
  std::string code;
  std::string description;
  bool operator==(const IndicatorEntry&) const = default;
};

struct SubGoalEntry {
  std::string code;
  std::string description;
  std::vector<IndicatorEntry> indicators;
  bool operator==(const SubGoalEntry&) const = default;
};

struct NewGoalEntry {
  std::string goal;  // "Goal 18: Title"
  std::vector<SubGoalEntry> sub_goals;
  std::string source;
  std::string description;
  bool operator==(const NewGoalEntry&) const = default;
};

struct NewGoalsDoc {
  std::vector<Relationship> relationships;
  std::vector<NewGoalEntry> new_goals;
  bool operator==(const NewGoalsDoc&) const = default;
};

enum class DocSchema { AnnotationDoc, KgDoc, NewGoalsDoc };
using StructuredDoc = std::variant<AnnotationDoc, KgDoc, NewGoalsDoc>;

// Locates the JSON object inside a provider reply: the first fenced block
// whose body is a JSON object, else the first balanced {...} span that parses.
// Throws Unparseable when neither exists.
nlohmann::json extract_json_object(std::string_view raw);

AnnotationDoc parse_annotation_doc(std::string_view raw);
KgDoc parse_kg_doc(std::string_view raw);
NewGoalsDoc parse_new_goals_doc(std::string_view raw);
StructuredDoc parse_structured(std::string_view raw, DocSchema schema);

AnnotationDoc annotation_from_json(const nlohmann::json& j);
KgDoc kg_from_json(const nlohmann::json& j);
NewGoalsDoc new_goals_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnnotationDoc& doc);
nlohmann::json to_json(const KgDoc& doc);
nlohmann::json to_json(const NewGoalsDoc& doc);

// Pretty-printed JSON text (2-space indent); parse_* accepts it back unchanged.
std::string serialize(const AnnotationDoc& doc);
std::string serialize(const KgDoc& doc);
std::string serialize(const NewGoalsDoc& doc);

// Two-space indented dump; invalid UTF-8 is replaced rather than thrown on.
std::string dump_json(const nlohmann::json& j);

// Wraps a document in a ```json fence, the transport providers are asked for.
std::string fenced(const std::string& json_text);

}  // namespace goalforge
