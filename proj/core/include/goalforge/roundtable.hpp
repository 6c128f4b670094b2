#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "goalforge/annotate.hpp"
#include "goalforge/catalog.hpp"
#include "goalforge/error.hpp"
#include "goalforge/llm.hpp"
#include "goalforge/prompt.hpp"
#include "goalforge/retrieval.hpp"

namespace goalforge {

// Advisory length the roundtable prompt asks for; never enforced.
inline constexpr std::size_t kTargetTranscriptWords = 8500;

struct RoundtableTranscript {
  int goal = 0;
  std::string dataset;
  std::vector<std::string> participant_ids;
  std::string text;
  std::size_t word_count = 0;
  RunMetadata metadata;
  bool operator==(const RoundtableTranscript&) const = default;
};

// Participants as numbered blocks: title, description, core value, key words, Q&A.
std::string render_kg_box(const std::vector<TalkAnnotation>& participants);
// Goal label, target texts and keywords.
std::string render_bg_box(const Catalog& catalog, int goal);

// The exact prompt simulate() sends.
std::string render_roundtable_prompt(const PromptLibrary& prompts, const Catalog& catalog, int goal,
                                     const std::vector<TalkAnnotation>& participants);

// `participants` must be the annotations of set.members, in member order.
// Throws NoCandidates for an empty set; provider errors (including
// SafetyBlocked) propagate.
RoundtableTranscript simulate(const ParticipantSet& set, const std::vector<TalkAnnotation>& participants,
                              const std::string& dataset, const Catalog& catalog, Gateway& gateway,
                              const PromptLibrary& prompts, const std::string& timestamp = {});

struct GoalFailure {
  int goal = 0;
  Errc code = Errc::ProviderError;
  std::string message;
  bool operator==(const GoalFailure&) const = default;
};

struct SimulationBatch {
  std::vector<RoundtableTranscript> transcripts;  // ascending goal
  std::vector<GoalFailure> failures;              // ascending goal
};

struct SimulationInputs {
  const EmbeddingIndex& index;
  const std::vector<TalkAnnotation>& annotations;
  std::size_t cap = kDefaultParticipantCap;
  unsigned workers = 4;
  std::vector<int> goals;  // empty = all 17
};

// Selects participants and simulates each goal independently. Per-goal
// failures are collected, never thrown.
SimulationBatch simulate_all(const SimulationInputs& inputs, const std::string& dataset, const Catalog& catalog,
                             Gateway& gateway, const PromptLibrary& prompts, const std::string& timestamp = {});

}  // namespace goalforge
