#include "goalforge/roundtable.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include "goalforge/util.hpp"

namespace goalforge {

std::string render_kg_box(const std::vector<TalkAnnotation>& participants) {
  std::string out;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    const auto& p = participants[i];
    if (i) out += "\n";
    out += "[Participant " + std::to_string(i + 1) + "]\n";
    out += "title: " + p.title + "\n";
    out += "description: " + p.description + "\n";
    out += "core_value: " + p.core_value + "\n";
    out += "key_words: " + join(p.key_words, ", ") + "\n";
    out += "qa:\n";
    for (std::size_t k = 0; k < p.qa.size(); ++k) {
      out += "Q" + std::to_string(k + 1) + ": " + p.qa[k].question + "\n";
      out += "A" + std::to_string(k + 1) + ": " + p.qa[k].answer + "\n";
    }
  }
  return out;
}

std::string render_bg_box(const Catalog& catalog, int goal) {
  const auto& g = catalog.goal(goal);
  std::string out = catalog.goal_label(goal) + "\nTargets:\n";
  for (const auto& t : g.targets) out += t.code + " " + t.description + "\n";
  out += "Keywords: " + join(g.keywords, ", ");
  return out;
}

std::string render_roundtable_prompt(const PromptLibrary& prompts, const Catalog& catalog, int goal,
                                     const std::vector<TalkAnnotation>& participants) {
  return prompts.get(TemplateName::Roundtable)
      .render({{"type", std::to_string(goal)},
               {"n", std::to_string(participants.size())},
               {"kg_box", render_kg_box(participants)},
               {"bg_box", render_bg_box(catalog, goal)}});
}

RoundtableTranscript simulate(const ParticipantSet& set, const std::vector<TalkAnnotation>& participants,
                              const std::string& dataset, const Catalog& catalog, Gateway& gateway,
                              const PromptLibrary& prompts, const std::string& timestamp) {
  if (set.members.empty()) {
    throw Error(Errc::NoCandidates, "goal " + std::to_string(set.goal) + " has no participants")
        .with_path(std::to_string(set.goal));
  }
  if (participants.size() != set.members.size()) {
    throw Error(Errc::InvalidArgument, "participant annotations do not match the participant set");
  }
  for (std::size_t i = 0; i < participants.size(); ++i) {
    if (participants[i].video_id != set.members[i]) {
      throw Error(Errc::InvalidArgument, "participant " + std::to_string(i) + " is out of order");
    }
  }
  const std::string prompt = render_roundtable_prompt(prompts, catalog, set.goal, participants);
  RoundtableTranscript t;
  t.goal = set.goal;
  t.dataset = dataset;
  t.participant_ids = set.members;
  t.metadata = gateway.metadata_for(prompt, timestamp);
  t.text = gateway.generate(prompt);
  if (trim(t.text).empty()) throw Error(Errc::ProviderError, "empty transcript for goal " + std::to_string(set.goal));
  t.word_count = word_count(t.text);
  spdlog::debug("goal {} transcript: {} words (prompt asks for {})", set.goal, t.word_count, kTargetTranscriptWords);
  return t;
}

SimulationBatch simulate_all(const SimulationInputs& inputs, const std::string& dataset, const Catalog& catalog,
                             Gateway& gateway, const PromptLibrary& prompts, const std::string& timestamp) {
  std::vector<int> goals = inputs.goals;
  if (goals.empty()) {
    for (int g = 1; g <= kGoalCount; ++g) goals.push_back(g);
  }
  std::sort(goals.begin(), goals.end());
  goals.erase(std::unique(goals.begin(), goals.end()), goals.end());

  std::map<std::string, std::set<int>> tags;
  std::map<std::string, const TalkAnnotation*> by_id;
  for (const auto& a : inputs.annotations) {
    tags[a.video_id] = a.sdg_types;
    by_id[a.video_id] = &a;
  }

  std::vector<std::optional<RoundtableTranscript>> results(goals.size());
  std::vector<std::optional<GoalFailure>> failures(goals.size());
  parallel_for(goals.size(), inputs.workers, [&](std::size_t i) {
    const int goal = goals[i];
    try {
      const auto set = select_participants(goal, inputs.index, tags, catalog, gateway, inputs.cap);
      std::vector<TalkAnnotation> participants;
      for (const auto& id : set.members) participants.push_back(*by_id.at(id));
      results[i] = simulate(set, participants, dataset, catalog, gateway, prompts, timestamp);
    } catch (const Error& e) {
      failures[i] = GoalFailure{goal, e.code(), e.what()};
    }
  });

  SimulationBatch batch;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (results[i]) batch.transcripts.push_back(std::move(*results[i]));
    if (failures[i]) batch.failures.push_back(std::move(*failures[i]));
  }
  return batch;
}

}  // namespace goalforge
