#include "goalforge/annotate.hpp"

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

TalkAnnotation validate_annotation(const AnnotationDoc& doc, const std::string& video_id, const Catalog& catalog) {
  if (trim(doc.title).empty()) throw Error::schema_violation("title", "must be non-empty");
  if (doc.qa.size() != kQaPairs) {
    throw Error::schema_violation("qa", "expected exactly " + std::to_string(kQaPairs) + " Q&A pairs, got " +
                                            std::to_string(doc.qa.size()));
  }
  for (std::size_t i = 0; i < doc.qa.size(); ++i) {
    if (trim(doc.qa[i].question).empty() || trim(doc.qa[i].answer).empty()) {
      throw Error::schema_violation("qa[" + std::to_string(i) + "]", "question and answer must be non-empty");
    }
  }
  std::vector<std::string> key_words;
  for (const auto& k : doc.key_words) {
    if (!trim(k).empty()) key_words.push_back(trim(k));
  }
  if (key_words.empty()) throw Error::schema_violation("key_words", "must contain at least one keyword");
  if (doc.sdg_types.empty()) throw Error::schema_violation("sdg_types", "must contain at least one goal");
  std::set<int> tags;
  for (std::size_t i = 0; i < doc.sdg_types.size(); ++i) {
    const long long g = doc.sdg_types[i];
    if (g < 1 || g > kGoalCount || !catalog.contains(static_cast<int>(g))) {
      throw Error::schema_violation("sdg_types[" + std::to_string(i) + "]",
                                    "goal " + std::to_string(g) + " is outside 1..17");
    }
    tags.insert(static_cast<int>(g));
  }
  return {video_id, trim(doc.title), trim(doc.description), trim(doc.core_value), key_words, doc.qa, tags};
}

std::string tedtalk_data(const TalkRecord& record) {
  return "Title: " + record.title + "\n\nTranscript:\n" + record.transcript.value_or("");
}

AnnotationOutcome annotate_talk(const TalkRecord& record, Gateway& gateway, const PromptLibrary& prompts,
                                const Catalog& catalog, const std::string& timestamp) {
  if (!record.usable || !record.transcript || record.transcript->empty()) {
    throw Error(Errc::InvalidArgument, "talk " + record.video_id + " is not usable for annotation");
  }
  const std::string prompt = prompts.get(TemplateName::Annotate).render({{"tedtalk_data", tedtalk_data(record)}});
  AnnotationOutcome out;
  out.metadata = gateway.metadata_for(prompt, timestamp);

  std::string current_prompt = prompt;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string reply;
    try {
      ++out.prompts_issued;
      reply = gateway.generate(current_prompt);
    } catch (const Error& e) {
      if (e.code() != Errc::SafetyBlocked) throw;
      out.skip = SkipReason::SafetyBlocked;
      out.error = e.what();
      return out;
    }
    try {
      out.annotation = validate_annotation(parse_annotation_doc(reply), record.video_id, catalog);
      return out;
    } catch (const Error& e) {
      if (e.code() != Errc::SchemaViolation && e.code() != Errc::Unparseable) throw;
      out.error = e.what();
      current_prompt = prompts.corrective(prompt, e.what(), reply);
    }
  }
  out.skip = SkipReason::AnnotationFailed;
  return out;
}

TagStats tag_statistics(const std::vector<std::set<int>>& tag_sets) {
  if (tag_sets.empty()) throw Error(Errc::EmptyDataset, "no annotated talks");
  TagStats s;
  s.talks = tag_sets.size();
  for (const auto& tags : tag_sets) {
    s.total_tags += tags.size();
    for (int g : tags) {
      if (g < 1 || g > kGoalCount) throw Error(Errc::InvalidArgument, "tag " + std::to_string(g) + " out of range");
      ++s.per_goal_counts[static_cast<std::size_t>(g)];
    }
  }
  s.mean_tags_per_talk = static_cast<double>(s.total_tags) / static_cast<double>(s.talks);
  return s;
}

}  // namespace goalforge
