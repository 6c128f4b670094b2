#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goalforge/analytics.hpp"
#include "goalforge/catalog.hpp"
#include "goalforge/kg.hpp"
#include "goalforge/synthesis.hpp"

namespace goalforge {

inline constexpr int kBundleSchemaVersion = 1;

struct BundleInputs {
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::string provider;
  std::vector<KnowledgeGraph> graphs;          // all 17 required
  std::vector<NewGoalProposal> proposals;      // may be empty
  std::vector<std::set<int>> tag_sets;         // empty = no co-occurrence documents
  int palette_size = kDefaultPalette;
};

// Relative path -> file contents. Pure function of the inputs and catalog.
using BundleFiles = std::map<std::string, std::string>;

// Graph documents (nodes carry degree and color_bin), metrics, new goals,
// co-occurrence matrix, heatmap, attribute network and manifest.json with
// sha256 checksums of every other file. Throws IncompleteDataset.
BundleFiles build_bundle(const BundleInputs& inputs, const Catalog& catalog);

// Writes the files under out_dir (created if missing) and removes stale
// bundle files from a previous export. Returns the manifest text.
std::string write_bundle(const std::filesystem::path& out_dir, const BundleFiles& files);

// Re-hashes every file listed in the manifest. Throws IntegrityViolation on
// a mismatch or missing file, IncompatibleVersion on a newer schema.
void verify_bundle(const std::filesystem::path& out_dir);

// Individual documents, also used by `analyze`.
std::string graph_document(const KnowledgeGraph& graph, const Catalog& catalog, int palette_size);
std::string metrics_document(const std::string& dataset, const std::vector<KgMetrics>& metrics);
std::string new_goals_document(const std::string& dataset, const std::vector<NewGoalProposal>& proposals);
std::string cooccurrence_document(const CooccurrenceMatrix& matrix);
std::string attribute_network_document(const std::string& dataset, const AttributeNetwork& network);
std::string comparison_document(const std::vector<ComparisonReport>& reports);

}  // namespace goalforge
