#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "goalforge/catalog.hpp"
#include "goalforge/kg.hpp"

namespace goalforge {

// ---- co-occurrence --------------------------------------------------------

enum class DiagonalMode {
  Any,        // cells[i][i] counts every talk tagged i
  SingleOnly  // cells[i][i] counts talks tagged with i alone
};

struct CooccurrenceMatrix {
  std::string dataset;
  std::array<std::array<std::size_t, kGoalCount>, kGoalCount> cells{};  // 0-based storage
  std::size_t talks = 0;

  // 1-based accessor.
  std::size_t at(int i, int j) const { return cells.at(static_cast<std::size_t>(i - 1)).at(static_cast<std::size_t>(j - 1)); }
  std::size_t max_cell() const;
  bool operator==(const CooccurrenceMatrix&) const = default;
};

// Throws EmptyDataset for no talks, InvalidArgument for tags outside 1..17.
CooccurrenceMatrix cooccurrence(const std::vector<std::set<int>>& tag_sets, const std::string& dataset = {},
                                DiagonalMode mode = DiagonalMode::Any);

struct AttributeEdge {
  int a = 0, b = 0;  // a < b
  std::size_t weight = 0;
  bool operator==(const AttributeEdge&) const = default;
};

struct AttributeNetwork {
  std::vector<int> nodes;  // goals with a non-zero diagonal
  std::vector<std::size_t> node_weights;
  std::vector<AttributeEdge> edges;
  bool operator==(const AttributeNetwork&) const = default;
};

AttributeNetwork attribute_network(const CooccurrenceMatrix& matrix, std::size_t min_weight = 1);

struct ZeroPair {
  int a = 0, b = 0;
  std::size_t count_a = 0, count_b = 0;
  bool operator==(const ZeroPair&) const = default;
};

// Goal pairs that never co-occur, a < b, sorted.
std::vector<ZeroPair> zero_pair_report(const CooccurrenceMatrix& matrix);

// 17x17 tab-separated table with a header row and column.
std::string matrix_tsv(const CooccurrenceMatrix& matrix);

// Deterministic SVG heatmap; the colour scale is anchored at the matrix max.
std::string heatmap_svg(const CooccurrenceMatrix& matrix);
// Colour of one cell value as "#rrggbb".
std::string heatmap_color(std::size_t value, std::size_t max_value);

// ---- knowledge graph metrics ------------------------------------------------

inline constexpr int kDefaultPalette = 8;

enum class DirectionTrend { Inward, Outward, Balanced };
std::string_view to_string(DirectionTrend trend) noexcept;

struct KgMetrics {
  int goal = 0;
  std::string initial_node;
  std::vector<std::string> most_connected;  // by node order
  std::string final_node;
  int color_variety = 0;
  DirectionTrend direction_trend = DirectionTrend::Balanced;
  bool mixed_direction = false;  // |outward - inward| <= 2
  std::size_t inward_count = 0;
  std::size_t outward_count = 0;
  std::size_t n_nodes = 0;
  std::size_t n_links = 0;
  std::size_t max_degree = 0;
  bool operator==(const KgMetrics&) const = default;
};

// Undirected degree per node in node order; a self-loop counts once.
std::vector<std::size_t> node_degrees(const KgDoc& graph);
// floor((deg - min) * palette / max(1, max - min + 1)) per node.
std::vector<int> color_bins(const std::vector<std::size_t>& degrees, int palette_size = kDefaultPalette);

// Throws EmptyGraph for no nodes, InvalidArgument for palette_size < 2.
KgMetrics kg_metrics(const KnowledgeGraph& graph, int palette_size = kDefaultPalette);

// Tab-separated metrics table mirroring the per-goal columns: goal,
// initial_node, most_connected (| separated), final_node, color_variety,
// direction_trend, mixed_direction, inward, outward, n_nodes, n_links.
std::string metrics_tsv(const std::vector<KgMetrics>& metrics);

// ---- dataset comparison -----------------------------------------------------

enum class LeveneCenter { Mean, Median };

struct LeveneResult {
  double w = 0.0;
  double p = 1.0;
  double df1 = 0.0, df2 = 0.0;
};

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Two-or-more-group Levene test. Zero within-group spread with zero
// between-group spread gives W = 0, p = 1.
LeveneResult levene(const std::vector<std::vector<double>>& groups, LeveneCenter center = LeveneCenter::Mean);
// Two-sided Welch t-test with Welch-Satterthwaite df. Both variances zero and
// equal means gives t = 0, p = 1.
WelchResult welch(const std::vector<double>& a, const std::vector<double>& b);

// Survival functions used by the tests above.
double f_sf(double x, double d1, double d2);
double t_two_sided_p(double t, double df);
// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

enum class CompareMetric { Nodes, Links };
std::string_view to_string(CompareMetric metric) noexcept;

struct ComparisonReport {
  CompareMetric metric = CompareMetric::Nodes;
  LeveneResult levene;
  WelchResult welch;
  double mean_a = 0.0, mean_b = 0.0;
  std::string dataset_a, dataset_b;
};

// Per-goal node or link counts of two complete datasets; IncompleteDataset otherwise.
ComparisonReport compare_datasets(const std::vector<KnowledgeGraph>& a, const std::vector<KnowledgeGraph>& b,
                                  CompareMetric metric, LeveneCenter center = LeveneCenter::Mean);

}  // namespace goalforge
