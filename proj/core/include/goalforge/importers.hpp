#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "goalforge/kg.hpp"
#include "goalforge/store.hpp"
#include "goalforge/synthesis.hpp"

namespace goalforge {

// Tag table: "# goalforge-tags\tversion=1\tdataset=<label>" header comment,
// then "video_id\tsdg_types" rows with comma-separated goals.
struct TagTable {
  std::string dataset;
  std::vector<std::string> video_ids;
  std::vector<std::set<int>> tags;
};
TagTable read_tag_table(const std::filesystem::path& path);
std::string write_tag_table(const TagTable& table);

// Graph directory: goal-01.json .. goal-17.json, each {"nodes", "links"}.
// Files must already satisfy the graph invariants (IntegrityViolation).
std::vector<KnowledgeGraph> read_graph_dir(const std::filesystem::path& dir, const std::string& dataset);

// A provider-style reply holding a new-goals document.
std::vector<NewGoalProposal> read_proposals(const std::filesystem::path& path);

// Loads the artifacts into a store as imported rows (talk stubs for tags,
// transcript stubs for graphs). Each replaces that stage's previous contents.
std::size_t import_tags(Store& store, const TagTable& table, const std::string& dataset);
std::size_t import_graphs(Store& store, const std::vector<KnowledgeGraph>& graphs, const std::string& dataset);
std::size_t import_proposals(Store& store, const std::vector<NewGoalProposal>& proposals, const std::string& dataset);

}  // namespace goalforge
