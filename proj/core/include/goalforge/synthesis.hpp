#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "goalforge/catalog.hpp"
#include "goalforge/documents.hpp"
#include "goalforge/kg.hpp"
#include "goalforge/llm.hpp"
#include "goalforge/prompt.hpp"

namespace goalforge {

inline constexpr int kFirstNewGoal = 18;

struct NewGoalProposal {
  int number = 0;
  std::string title;
  std::vector<SubGoalEntry> sub_goals;
  std::set<int> source_goals;
  std::string source;       // the reply's own Source text
  std::string description;
  std::string rationale;    // relationship explanations that involve the source goals, verbatim
  bool operator==(const NewGoalProposal&) const = default;
};

// Validates a parsed reply: "Goal N: Title" headings numbered consecutively
// from 18, sub-goal codes "N.k", indicator codes "N.k.m", at least one
// indicator per sub-goal and at least two distinct source goals in 1..17.
// Source goals come from the Source field, falling back to "Goal N" mentions
// in the description and matching relationships. Throws SchemaViolation.
std::vector<NewGoalProposal> proposals_from_doc(const NewGoalsDoc& doc);

struct SynthesisOutcome {
  std::vector<NewGoalProposal> proposals;
  NewGoalsDoc document;
  RunMetadata metadata;
  int prompts_issued = 0;
};

// Needs all 17 graphs (IncompleteDataset). One corrective re-prompt on an
// unparseable or invalid reply, then SynthesisFailed.
SynthesisOutcome synthesize(const std::vector<KnowledgeGraph>& graphs, const Catalog& catalog, Gateway& gateway,
                            const PromptLibrary& prompts, const std::string& timestamp = {});

struct ProposalStats {
  std::size_t count = 0;
  std::map<int, std::size_t> source_goal_frequency;
  std::map<std::size_t, std::size_t> subgoals_per_goal;       // sub-goal count -> proposals
  std::map<std::size_t, std::size_t> indicators_per_subgoal;  // indicator count -> sub-goals
  bool operator==(const ProposalStats&) const = default;
};

// Throws EmptyDataset for no proposals.
ProposalStats proposal_stats(const std::vector<NewGoalProposal>& proposals);

}  // namespace goalforge
