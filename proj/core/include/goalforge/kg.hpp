#pragma once

#include <string>
#include <vector>

#include "goalforge/catalog.hpp"
#include "goalforge/documents.hpp"
#include "goalforge/llm.hpp"
#include "goalforge/prompt.hpp"
#include "goalforge/roundtable.hpp"

namespace goalforge {

enum class RepairKind { DroppedInvalidNode, MergedDuplicateNode, DroppedDanglingLink, RenumberedOrder };
std::string_view to_string(RepairKind kind) noexcept;

struct RepairAction {
  RepairKind kind;
  std::string subject;  // node id or "source -> target"
  std::string detail;
  bool operator==(const RepairAction&) const = default;
};

struct RepairReport {
  std::vector<RepairAction> actions;
  bool empty() const noexcept { return actions.empty(); }
  std::size_t count(RepairKind kind) const;
  bool operator==(const RepairReport&) const = default;
};

// Problems that validate_and_repair would fix; empty means the document
// already satisfies every graph invariant.
std::vector<std::string> integrity_problems(const KgDoc& doc);

struct RepairResult {
  KgDoc doc;
  RepairReport report;
};

// Trims ids, drops nodes with empty ids, merges duplicate ids (earliest order
// kept, details concatenated), drops links whose endpoints do not resolve and
// renumbers orders to 1..N preserving relative sequence. Idempotent.
// Throws EmptyGraph when no node survives.
RepairResult validate_and_repair(const KgDoc& doc);

struct KnowledgeGraph {
  int goal = 0;
  std::string dataset;
  std::vector<KgNode> nodes;  // ascending order, orders 1..N
  std::vector<KgLink> links;
  RunMetadata provenance;
  RepairReport repairs;
  bool operator==(const KnowledgeGraph&) const = default;

  KgDoc doc() const { return {nodes, links}; }
};

// Wraps an already-repaired document.
KnowledgeGraph make_graph(int goal, const std::string& dataset, const KgDoc& doc, RunMetadata provenance = {});

struct ExtractionOutcome {
  KnowledgeGraph graph;
  int prompts_issued = 0;
};

// Renders the extraction prompt, parses the reply and repairs it. A parse
// failure gets one corrective re-prompt, then ExtractionFailed. Integrity
// problems also get one corrective re-prompt before local repair.
ExtractionOutcome extract_graph(const RoundtableTranscript& transcript, Gateway& gateway,
                                const PromptLibrary& prompts, const std::string& ontology_guide,
                                const std::string& timestamp = {});

struct GraphTotals {
  std::size_t total_nodes = 0;
  std::size_t total_links = 0;
  double mean_nodes = 0.0;
  double mean_links = 0.0;
  bool operator==(const GraphTotals&) const = default;
};

// Requires exactly one graph per goal 1..17; IncompleteDataset otherwise.
GraphTotals graph_totals(const std::vector<KnowledgeGraph>& graphs);
void require_complete(const std::vector<KnowledgeGraph>& graphs, const std::string& dataset);

// The kg_data slot: a JSON array with one {goal, title, nodes, links} section
// per graph in goal order.
std::string serialize_kg_data(const std::vector<KnowledgeGraph>& graphs, const Catalog& catalog);

}  // namespace goalforge
