#include "goalforge/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace {

std::set<int> goal_mentions(const std::string& text) {
  static const std::regex pattern(R"(\bGoals?\s*(\d{1,2})\b)", std::regex::icase);
  std::set<int> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it) {
    const int g = std::stoi((*it)[1].str());
    if (g >= 1 && g <= kGoalCount) out.insert(g);
  }
  return out;
}

bool code_matches(const std::string& code, const std::string& prefix) {
  if (!code.starts_with(prefix + ".")) return false;
  const std::string rest = code.substr(prefix.size() + 1);
  return !rest.empty() && rest.find('.') == std::string::npos &&
         std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isalnum(c); });
}

}  // namespace

std::vector<NewGoalProposal> proposals_from_doc(const NewGoalsDoc& doc) {
  static const std::regex heading(R"(^\s*Goal\s+(\d+)\s*[:.\-]\s*(.+?)\s*$)", std::regex::icase);
  if (doc.new_goals.empty()) throw Error::schema_violation("new_goals", "no proposals");
  std::vector<NewGoalProposal> out;
  for (std::size_t i = 0; i < doc.new_goals.size(); ++i) {
    const auto& entry = doc.new_goals[i];
    const std::string path = "new_goals[" + std::to_string(i) + "]";
    std::smatch m;
    if (!std::regex_match(entry.goal, m, heading)) {
      throw Error::schema_violation(path + ".goal", "expected \"Goal N: Title\", got \"" + entry.goal + "\"");
    }
    NewGoalProposal p;
    p.number = std::stoi(m[1].str());
    p.title = m[2].str();
    if (p.number < kFirstNewGoal) {
      throw Error::schema_violation(path + ".goal", "goal number " + std::to_string(p.number) + " is below 18");
    }
    if (p.number != kFirstNewGoal + static_cast<int>(i)) {
      throw Error::schema_violation(path + ".goal", "goal numbers must run consecutively from 18");
    }
    const std::string n = std::to_string(p.number);
    if (entry.sub_goals.empty()) throw Error::schema_violation(path + ".sub_goals", "at least one sub-goal required");
    for (std::size_t s = 0; s < entry.sub_goals.size(); ++s) {
      const auto& sub = entry.sub_goals[s];
      const std::string spath = path + ".sub_goals[" + std::to_string(s) + "]";
      if (!code_matches(sub.code, n)) throw Error::schema_violation(spath + ".code", "expected " + n + ".k, got " + sub.code);
      if (sub.indicators.empty()) throw Error::schema_violation(spath + ".indicators", "at least one indicator required");
      for (std::size_t k = 0; k < sub.indicators.size(); ++k) {
        if (!code_matches(sub.indicators[k].code, sub.code)) {
          throw Error::schema_violation(spath + ".indicators[" + std::to_string(k) + "].code",
                                        "expected " + sub.code + ".m, got " + sub.indicators[k].code);
        }
      }
    }
    p.sub_goals = entry.sub_goals;
    p.source = entry.source;
    p.description = entry.description;
    p.source_goals = goal_mentions(entry.source);
    if (p.source_goals.size() < 2) {
      auto more = goal_mentions(entry.description);
      p.source_goals.insert(more.begin(), more.end());
    }
    if (p.source_goals.size() < 2) {
      throw Error::schema_violation(path + ".source", "a proposal needs at least two source goals");
    }
    std::vector<std::string> rationale;
    for (const auto& r : doc.relationships) {
      const bool relevant = std::any_of(r.goals.begin(), r.goals.end(), [&](long long g) {
        return p.source_goals.contains(static_cast<int>(g));
      });
      if (relevant) rationale.push_back(r.relation + " (" + r.source + ")");
    }
    p.rationale = join(rationale, "\n");
    out.push_back(std::move(p));
  }
  return out;
}

SynthesisOutcome synthesize(const std::vector<KnowledgeGraph>& graphs, const Catalog& catalog, Gateway& gateway,
                            const PromptLibrary& prompts, const std::string& timestamp) {
  require_complete(graphs, graphs.empty() ? std::string() : graphs.front().dataset);
  const std::string prompt =
      prompts.get(TemplateName::NewGoals).render({{"kg_data", serialize_kg_data(graphs, catalog)}});
  SynthesisOutcome out;
  out.metadata = gateway.metadata_for(prompt, timestamp);
  std::string current = prompt;
  std::string problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ++out.prompts_issued;
    const std::string reply = gateway.generate(current);
    try {
      out.document = parse_new_goals_doc(reply);
      out.proposals = proposals_from_doc(out.document);
      return out;
    } catch (const Error& e) {
      if (e.code() != Errc::Unparseable && e.code() != Errc::SchemaViolation) throw;
      problem = e.what();
      current = prompts.corrective(prompt, problem, reply);
    }
  }
  throw Error(Errc::SynthesisFailed, "new goal synthesis failed: " + problem);
}

ProposalStats proposal_stats(const std::vector<NewGoalProposal>& proposals) {
  if (proposals.empty()) throw Error(Errc::EmptyDataset, "no proposals");
  ProposalStats s;
  s.count = proposals.size();
  for (const auto& p : proposals) {
    for (int g : p.source_goals) ++s.source_goal_frequency[g];
    ++s.subgoals_per_goal[p.sub_goals.size()];
    for (const auto& sub : p.sub_goals) ++s.indicators_per_subgoal[sub.indicators.size()];
  }
  return s;
}

}  // namespace goalforge
