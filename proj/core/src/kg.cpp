#include "goalforge/kg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

using nlohmann::json;

std::string_view to_string(RepairKind kind) noexcept {
  switch (kind) {
    case RepairKind::DroppedInvalidNode: return "DroppedInvalidNode";
    case RepairKind::MergedDuplicateNode: return "MergedDuplicateNode";
    case RepairKind::DroppedDanglingLink: return "DroppedDanglingLink";
    case RepairKind::RenumberedOrder: return "RenumberedOrder";
  }
  return "?";
}

std::size_t RepairReport::count(RepairKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(actions.begin(), actions.end(), [&](const RepairAction& a) { return a.kind == kind; }));
}

std::vector<std::string> integrity_problems(const KgDoc& doc) {
  std::vector<std::string> problems;
  if (doc.nodes.empty()) problems.push_back("graph has no nodes");
  std::set<std::string> ids;
  std::set<long long> orders;
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    const auto& n = doc.nodes[i];
    if (n.id.empty() || n.id != trim(n.id)) problems.push_back("nodes[" + std::to_string(i) + "] has an untrimmed or empty id");
    if (!ids.insert(n.id).second) problems.push_back("duplicate node id \"" + n.id + "\"");
    orders.insert(n.order);
    if (i > 0 && n.order <= doc.nodes[i - 1].order) problems.push_back("node orders are not ascending at nodes[" + std::to_string(i) + "]");
  }
  if (!doc.nodes.empty() && (orders.size() != doc.nodes.size() || *orders.begin() != 1 ||
                             *orders.rbegin() != static_cast<long long>(doc.nodes.size()))) {
    problems.push_back("node orders are not 1.." + std::to_string(doc.nodes.size()));
  }
  for (const auto& l : doc.links) {
    for (const auto* end : {&l.source, &l.target}) {
      if (!ids.contains(*end)) problems.push_back("link endpoint \"" + *end + "\" is not a node");
    }
  }
  return problems;
}

RepairResult validate_and_repair(const KgDoc& input) {
  RepairResult out;
  auto& report = out.report;

  struct Merged {
    KgNode node;
    std::size_t first_index;
  };
  std::vector<Merged> merged;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < input.nodes.size(); ++i) {
    KgNode n = input.nodes[i];
    n.id = trim(n.id);
    if (n.id.empty()) {
      report.actions.push_back({RepairKind::DroppedInvalidNode, "nodes[" + std::to_string(i) + "]", "empty id"});
      continue;
    }
    auto [it, inserted] = slot.try_emplace(n.id, merged.size());
    if (inserted) {
      merged.push_back({std::move(n), i});
      continue;
    }
    auto& kept = merged[it->second].node;
    kept.order = std::min(kept.order, n.order);
    if (!n.details.empty() && n.details != kept.details) {
      kept.details = kept.details.empty() ? n.details : kept.details + " " + n.details;
    }
    report.actions.push_back({RepairKind::MergedDuplicateNode, n.id, "merged duplicate at nodes[" + std::to_string(i) + "]"});
  }
  if (merged.empty()) throw Error(Errc::EmptyGraph, "no nodes survive validation");

  for (const auto& l : input.links) {
    KgLink link{trim(l.source), trim(l.target), l.relation};
    if (!slot.contains(link.source) || !slot.contains(link.target)) {
      report.actions.push_back({RepairKind::DroppedDanglingLink, link.source + " -> " + link.target,
                                "endpoint missing from nodes"});
      continue;
    }
    out.doc.links.push_back(std::move(link));
  }

  std::stable_sort(merged.begin(), merged.end(), [](const Merged& a, const Merged& b) {
    return a.node.order != b.node.order ? a.node.order < b.node.order : a.first_index < b.first_index;
  });
  for (std::size_t i = 0; i < merged.size(); ++i) {
    auto& n = merged[i].node;
    const auto want = static_cast<long long>(i + 1);
    if (n.order != want) {
      report.actions.push_back(
          {RepairKind::RenumberedOrder, n.id, std::to_string(n.order) + " -> " + std::to_string(want)});
      n.order = want;
    }
    out.doc.nodes.push_back(std::move(n));
  }
  return out;
}

KnowledgeGraph make_graph(int goal, const std::string& dataset, const KgDoc& doc, RunMetadata provenance) {
  if (auto problems = integrity_problems(doc); !problems.empty()) {
    throw Error(Errc::IntegrityViolation, "goal " + std::to_string(goal) + ": " + problems.front());
  }
  return {goal, dataset, doc.nodes, doc.links, std::move(provenance), {}};
}

ExtractionOutcome extract_graph(const RoundtableTranscript& transcript, Gateway& gateway,
                                const PromptLibrary& prompts, const std::string& ontology_guide,
                                const std::string& timestamp) {
  if (trim(transcript.text).empty()) throw Error(Errc::InvalidArgument, "empty transcript");
  const std::string prompt = prompts.get(TemplateName::KgExtract)
                                 .render({{"kg_guide", ontology_guide}, {"conversation_script", transcript.text}});
  const auto goal_path = std::to_string(transcript.goal);
  ExtractionOutcome out;

  std::optional<KgDoc> best;
  std::string current = prompt;
  std::string problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ++out.prompts_issued;
    const std::string reply = gateway.generate(current);
    try {
      KgDoc doc = parse_kg_doc(reply);
      auto problems = integrity_problems(doc);
      if (problems.empty()) {
        best = std::move(doc);
        break;
      }
      problem = "integrity: " + join(problems, "; ");
      best = std::move(doc);
      current = prompts.corrective(prompt, problem, reply);
    } catch (const Error& e) {
      if (e.code() != Errc::Unparseable && e.code() != Errc::SchemaViolation) throw;
      problem = e.what();
      // A structurally broken retry does not discard a usable first reply.
      if (best) break;
      current = prompts.corrective(prompt, problem, reply);
    }
  }
  if (!best) {
    throw Error(Errc::ExtractionFailed, "goal " + goal_path + ": " + problem).with_path(goal_path);
  }
  RepairResult repaired;
  try {
    repaired = validate_and_repair(*best);
  } catch (const Error& e) {
    throw Error(Errc::ExtractionFailed, "goal " + goal_path + ": " + e.what()).with_path(goal_path);
  }
  out.graph = make_graph(transcript.goal, transcript.dataset, repaired.doc, gateway.metadata_for(prompt, timestamp));
  out.graph.repairs = std::move(repaired.report);
  return out;
}

void require_complete(const std::vector<KnowledgeGraph>& graphs, const std::string& dataset) {
  std::set<int> goals;
  for (const auto& g : graphs) goals.insert(g.goal);
  if (graphs.size() != static_cast<std::size_t>(kGoalCount) || goals.size() != graphs.size() ||
      *goals.begin() != 1 || *goals.rbegin() != kGoalCount) {
    std::vector<std::string> missing;
    for (int g = 1; g <= kGoalCount; ++g) {
      if (!goals.contains(g)) missing.push_back(std::to_string(g));
    }
    throw Error(Errc::IncompleteDataset, "dataset " + dataset + " has " + std::to_string(goals.size()) +
                                             " of 17 graphs" + (missing.empty() ? "" : "; missing " + join(missing, ",")))
        .with_path(dataset);
  }
}

GraphTotals graph_totals(const std::vector<KnowledgeGraph>& graphs) {
  require_complete(graphs, graphs.empty() ? std::string() : graphs.front().dataset);
  GraphTotals t;
  for (const auto& g : graphs) {
    t.total_nodes += g.nodes.size();
    t.total_links += g.links.size();
  }
  t.mean_nodes = static_cast<double>(t.total_nodes) / kGoalCount;
  t.mean_links = static_cast<double>(t.total_links) / kGoalCount;
  return t;
}

std::string serialize_kg_data(const std::vector<KnowledgeGraph>& graphs, const Catalog& catalog) {
  std::vector<const KnowledgeGraph*> sorted;
  for (const auto& g : graphs) sorted.push_back(&g);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->goal < b->goal; });
  json sections = json::array();
  for (const auto* g : sorted) {
    json doc = to_json(g->doc());
    sections.push_back({{"goal", g->goal},
                        {"title", catalog.contains(g->goal) ? catalog.goal(g->goal).title : std::string()},
                        {"nodes", doc["nodes"]},
                        {"links", doc["links"]}});
  }
  return sections.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace goalforge
