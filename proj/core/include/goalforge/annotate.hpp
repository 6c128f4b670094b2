#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goalforge/catalog.hpp"
#include "goalforge/corpus.hpp"
#include "goalforge/documents.hpp"
#include "goalforge/llm.hpp"
#include "goalforge/prompt.hpp"

namespace goalforge {

inline constexpr std::size_t kQaPairs = 5;

struct TalkAnnotation {
  std::string video_id;
  std::string title;
  std::string description;
  std::string core_value;
  std::vector<std::string> key_words;
  std::vector<QaPair> qa;
  std::set<int> sdg_types;

  bool operator==(const TalkAnnotation&) const = default;
};

// Applies the annotation rules: exactly 5 Q&A pairs, non-empty key_words and
// sdg_types, every tag a catalog goal. Duplicate tags collapse.
// Throws SchemaViolation naming the offending path (e.g. "sdg_types[2]").
TalkAnnotation validate_annotation(const AnnotationDoc& doc, const std::string& video_id, const Catalog& catalog);

// The tedtalk_data slot: title header plus the transcript. Catalog keywords
// are deliberately not included.
std::string tedtalk_data(const TalkRecord& record);

struct AnnotationOutcome {
  std::optional<TalkAnnotation> annotation;
  std::optional<SkipReason> skip;  // AnnotationFailed or SafetyBlocked
  int prompts_issued = 0;
  std::string error;               // last problem seen, for the audit log
  RunMetadata metadata;
};

// One generation, one corrective re-prompt on a parse or rule failure, then
// AnnotationFailed. SafetyBlocked becomes a skip. Other provider errors throw.
AnnotationOutcome annotate_talk(const TalkRecord& record, Gateway& gateway, const PromptLibrary& prompts,
                                const Catalog& catalog, const std::string& timestamp = {});

struct TagStats {
  std::size_t talks = 0;
  std::size_t total_tags = 0;
  double mean_tags_per_talk = 0.0;
  std::array<std::size_t, kGoalCount + 1> per_goal_counts{};  // index 1..17

  bool operator==(const TagStats&) const = default;
};

// Throws EmptyDataset for zero talks.
TagStats tag_statistics(const std::vector<std::set<int>>& tag_sets);

}  // namespace goalforge
