#include "goalforge/export.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>

#include "goalforge/documents.hpp"
#include "goalforge/error.hpp"
#include "goalforge/store.hpp"
#include "goalforge/util.hpp"

#ifndef GOALFORGE_VERSION
#define GOALFORGE_VERSION "0.0.0"
#endif

namespace goalforge {

using nlohmann::json;

namespace {

std::string goal_file(int goal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "graphs/goal-%02d.json", goal);
  return buf;
}

std::string text(const json& j) { return dump_json(j) + "\n"; }

}  // namespace

std::string graph_document(const KnowledgeGraph& graph, const Catalog& catalog, int palette_size) {
  const auto degrees = node_degrees(graph.doc());
  const auto bins = color_bins(degrees, palette_size);
  json nodes = json::array();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& n = graph.nodes[i];
    nodes.push_back({{"id", n.id}, {"order", n.order}, {"details", n.details}, {"degree", degrees[i]},
                     {"color_bin", bins[i]}});
  }
  json links = json::array();
  for (const auto& l : graph.links) links.push_back({{"source", l.source}, {"target", l.target}, {"relation", l.relation}});
  return text({{"schema_version", kBundleSchemaVersion},
               {"dataset", graph.dataset},
               {"goal", graph.goal},
               {"title", catalog.goal(graph.goal).title},
               {"palette_size", palette_size},
               {"nodes", nodes},
               {"links", links}});
}

std::string metrics_document(const std::string& dataset, const std::vector<KgMetrics>& metrics) {
  json rows = json::array();
  for (const auto& m : metrics) {
    rows.push_back({{"goal", m.goal},
                    {"initial_node", m.initial_node},
                    {"most_connected", m.most_connected},
                    {"final_node", m.final_node},
                    {"color_variety", m.color_variety},
                    {"direction_trend", to_string(m.direction_trend)},
                    {"mixed_direction", m.mixed_direction},
                    {"inward_count", m.inward_count},
                    {"outward_count", m.outward_count},
                    {"n_nodes", m.n_nodes},
                    {"n_links", m.n_links},
                    {"max_degree", m.max_degree}});
  }
  return text({{"schema_version", kBundleSchemaVersion}, {"dataset", dataset}, {"goals", rows}});
}

std::string new_goals_document(const std::string& dataset, const std::vector<NewGoalProposal>& proposals) {
  json list = json::array();
  for (const auto& p : proposals) {
    NewGoalsDoc doc;
    doc.new_goals.push_back({"", p.sub_goals, "", ""});
    list.push_back({{"number", p.number},
                    {"goal", "Goal " + std::to_string(p.number) + ": " + p.title},
                    {"title", p.title},
                    {"sub_goals", to_json(doc)["results"]["new_goals"][0]["sub_goals"]},
                    {"source", p.source},
                    {"source_goals", std::vector<int>(p.source_goals.begin(), p.source_goals.end())},
                    {"description", p.description},
                    {"rationale", p.rationale}});
  }
  return text({{"schema_version", kBundleSchemaVersion}, {"dataset", dataset}, {"proposals", list}});
}

std::string cooccurrence_document(const CooccurrenceMatrix& m) {
  json cells = json::array();
  for (const auto& row : m.cells) cells.push_back(row);
  std::vector<int> goals;
  for (int g = 1; g <= kGoalCount; ++g) goals.push_back(g);
  return text({{"schema_version", kBundleSchemaVersion},
               {"dataset", m.dataset},
               {"talks", m.talks},
               {"goals", goals},
               {"cells", cells}});
}

std::string attribute_network_document(const std::string& dataset, const AttributeNetwork& net) {
  json nodes = json::array();
  for (std::size_t i = 0; i < net.nodes.size(); ++i) nodes.push_back({{"goal", net.nodes[i]}, {"weight", net.node_weights[i]}});
  json edges = json::array();
  for (const auto& e : net.edges) edges.push_back({{"source", e.a}, {"target", e.b}, {"weight", e.weight}});
  return text({{"schema_version", kBundleSchemaVersion}, {"dataset", dataset}, {"nodes", nodes}, {"edges", edges}});
}

std::string comparison_document(const std::vector<ComparisonReport>& reports) {
  json list = json::array();
  for (const auto& r : reports) {
    list.push_back({{"metric", to_string(r.metric)},
                    {"datasets", {r.dataset_a, r.dataset_b}},
                    {"means", {r.mean_a, r.mean_b}},
                    {"levene", {{"W", r.levene.w}, {"p", r.levene.p}, {"df1", r.levene.df1}, {"df2", r.levene.df2}}},
                    {"welch", {{"t", r.welch.t}, {"df", r.welch.df}, {"p", r.welch.p}}}});
  }
  return text({{"schema_version", kBundleSchemaVersion}, {"comparisons", list}});
}

BundleFiles build_bundle(const BundleInputs& in, const Catalog& catalog) {
  require_complete(in.graphs, in.dataset);
  std::vector<const KnowledgeGraph*> graphs;
  for (const auto& g : in.graphs) graphs.push_back(&g);
  std::sort(graphs.begin(), graphs.end(), [](auto* a, auto* b) { return a->goal < b->goal; });

  BundleFiles files;
  std::vector<KgMetrics> metrics;
  for (const auto* g : graphs) {
    files[goal_file(g->goal)] = graph_document(*g, catalog, in.palette_size);
    metrics.push_back(kg_metrics(*g, in.palette_size));
  }
  files["metrics.json"] = metrics_document(in.dataset, metrics);
  files["metrics.tsv"] = metrics_tsv(metrics);
  files["new-goals.json"] = new_goals_document(in.dataset, in.proposals);
  if (!in.tag_sets.empty()) {
    const auto matrix = cooccurrence(in.tag_sets, in.dataset);
    files["cooccurrence.json"] = cooccurrence_document(matrix);
    files["cooccurrence.tsv"] = matrix_tsv(matrix);
    files["heatmap.svg"] = heatmap_svg(matrix);
    files["attribute-network.json"] = attribute_network_document(in.dataset, attribute_network(matrix, 1));
  }

  json entries = json::array();
  for (const auto& [path, contents] : files) {
    entries.push_back({{"path", path}, {"sha256", sha256_hex(contents)}, {"bytes", contents.size()}});
  }
  json manifest = {{"schema_version", kBundleSchemaVersion},
                   {"dataset", in.dataset},
                   {"seed", in.seed ? json(*in.seed) : json(nullptr)},
                   {"provider", in.provider},
                   {"palette_size", in.palette_size},
                   {"versions",
                    {{"goalforge", GOALFORGE_VERSION},
                     {"bundle_schema", kBundleSchemaVersion},
                     {"store_schema", kStoreSchemaVersion}}},
                   {"files", entries}};
  files["manifest.json"] = text(manifest);
  return files;
}

std::string write_bundle(const std::filesystem::path& out_dir, const BundleFiles& files) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  // Remove files a previous export wrote but this one does not.
  const fs::path old_manifest = out_dir / "manifest.json";
  if (fs::exists(old_manifest)) {
    const json old = json::parse(read_file(old_manifest), nullptr, false);
    if (!old.is_discarded() && old.contains("files")) {
      for (const auto& e : old["files"]) {
        const std::string path = e.value("path", "");
        if (!path.empty() && !files.contains(path) && path.find("..") == std::string::npos) fs::remove(out_dir / path);
      }
    }
  }
  for (const auto& [path, contents] : files) {
    const fs::path target = out_dir / path;
    fs::create_directories(target.parent_path());
    write_file(target, contents);
  }
  return files.at("manifest.json");
}

void verify_bundle(const std::filesystem::path& out_dir) {
  const json manifest = json::parse(read_file(out_dir / "manifest.json"), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("files")) {
    throw Error(Errc::IntegrityViolation, "unreadable bundle manifest in " + out_dir.string());
  }
  if (manifest.value("schema_version", 0) > kBundleSchemaVersion) {
    throw Error(Errc::IncompatibleVersion, "bundle schema version is newer than this build");
  }
  for (const auto& e : manifest["files"]) {
    const std::string path = e.value("path", "");
    const auto file = out_dir / path;
    if (!std::filesystem::exists(file)) throw Error(Errc::IntegrityViolation, "missing bundle file " + path).with_path(path);
    if (sha256_hex(read_file(file)) != e.value("sha256", "")) {
      throw Error(Errc::IntegrityViolation, "checksum mismatch for " + path).with_path(path);
    }
  }
}

}  // namespace goalforge
