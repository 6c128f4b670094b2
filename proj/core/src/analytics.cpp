#include "goalforge/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

// ---- co-occurrence --------------------------------------------------------

std::size_t CooccurrenceMatrix::max_cell() const {
  std::size_t m = 0;
  for (const auto& row : cells) m = std::max(m, *std::max_element(row.begin(), row.end()));
  return m;
}

CooccurrenceMatrix cooccurrence(const std::vector<std::set<int>>& tag_sets, const std::string& dataset,
                                DiagonalMode mode) {
  if (tag_sets.empty()) throw Error(Errc::EmptyDataset, "no annotated talks" + (dataset.empty() ? "" : " in " + dataset));
  CooccurrenceMatrix m;
  m.dataset = dataset;
  m.talks = tag_sets.size();
  for (const auto& tags : tag_sets) {
    for (int g : tags) {
      if (g < 1 || g > kGoalCount) throw Error(Errc::InvalidArgument, "tag " + std::to_string(g) + " out of range");
    }
    for (int i : tags) {
      for (int j : tags) {
        if (i == j && mode == DiagonalMode::SingleOnly && tags.size() != 1) continue;
        ++m.cells[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
      }
    }
  }
  return m;
}

AttributeNetwork attribute_network(const CooccurrenceMatrix& matrix, std::size_t min_weight) {
  AttributeNetwork net;
  for (int i = 1; i <= kGoalCount; ++i) {
    if (matrix.at(i, i) == 0) continue;
    net.nodes.push_back(i);
    net.node_weights.push_back(matrix.at(i, i));
  }
  for (std::size_t x = 0; x < net.nodes.size(); ++x) {
    for (std::size_t y = x + 1; y < net.nodes.size(); ++y) {
      const std::size_t w = matrix.at(net.nodes[x], net.nodes[y]);
      if (w > 0 && w >= min_weight) net.edges.push_back({net.nodes[x], net.nodes[y], w});
    }
  }
  return net;
}

std::vector<ZeroPair> zero_pair_report(const CooccurrenceMatrix& matrix) {
  std::vector<ZeroPair> out;
  for (int i = 1; i <= kGoalCount; ++i) {
    for (int j = i + 1; j <= kGoalCount; ++j) {
      if (matrix.at(i, j) == 0) out.push_back({i, j, matrix.at(i, i), matrix.at(j, j)});
    }
  }
  return out;
}

std::string matrix_tsv(const CooccurrenceMatrix& matrix) {
  std::string out = "goal";
  for (int j = 1; j <= kGoalCount; ++j) out += "\t" + std::to_string(j);
  out += "\n";
  for (int i = 1; i <= kGoalCount; ++i) {
    out += std::to_string(i);
    for (int j = 1; j <= kGoalCount; ++j) out += "\t" + std::to_string(matrix.at(i, j));
    out += "\n";
  }
  return out;
}

std::string heatmap_color(std::size_t value, std::size_t max_value) {
  // Linear ramp from a pale to a deep blue, in integer arithmetic.
  constexpr int lo[3] = {0xf7, 0xfb, 0xff};
  constexpr int hi[3] = {0x08, 0x30, 0x6b};
  const std::size_t v = max_value == 0 ? 0 : std::min(value, max_value);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    const long long span = hi[c] - lo[c];
    const long long num = span * static_cast<long long>(v);
    const long long den = static_cast<long long>(std::max<std::size_t>(max_value, 1));
    // Round half away from zero so the ramp is symmetric for both signs.
    const long long step = num >= 0 ? (2 * num + den) / (2 * den) : -((-2 * num + den) / (2 * den));
    rgb[c] = static_cast<int>(lo[c] + step);
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string heatmap_svg(const CooccurrenceMatrix& matrix) {
  constexpr int cell = 36;
  constexpr int margin = 40;
  constexpr int size = margin + cell * kGoalCount + 8;
  const std::size_t max_value = matrix.max_cell();
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) + "\" height=\"" +
         std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) + " " + std::to_string(size) + "\">\n";
  svg += "<style>text{font-family:sans-serif;font-size:11px}</style>\n";
  for (int k = 1; k <= kGoalCount; ++k) {
    const int c = margin + (k - 1) * cell + cell / 2;
    svg += "<text x=\"" + std::to_string(c) + "\" y=\"" + std::to_string(margin - 8) +
           "\" text-anchor=\"middle\">" + std::to_string(k) + "</text>\n";
    svg += "<text x=\"" + std::to_string(margin - 8) + "\" y=\"" + std::to_string(c + 4) +
           "\" text-anchor=\"end\">" + std::to_string(k) + "</text>\n";
  }
  for (int i = 1; i <= kGoalCount; ++i) {
    for (int j = 1; j <= kGoalCount; ++j) {
      const std::size_t v = matrix.at(i, j);
      const int x = margin + (j - 1) * cell;
      const int y = margin + (i - 1) * cell;
      const bool dark = max_value > 0 && v * 2 > max_value;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" + std::to_string(cell) +
             "\" height=\"" + std::to_string(cell) + "\" fill=\"" + heatmap_color(v, max_value) +
             "\" data-row=\"" + std::to_string(i) + "\" data-col=\"" + std::to_string(j) + "\" data-value=\"" +
             std::to_string(v) + "\"/>\n";
      svg += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" + std::to_string(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\" fill=\"" + (dark ? "#ffffff" : "#000000") + "\">" + std::to_string(v) +
             "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

// ---- knowledge graph metrics ------------------------------------------------

std::string_view to_string(DirectionTrend trend) noexcept {
  switch (trend) {
    case DirectionTrend::Inward: return "Inward";
    case DirectionTrend::Outward: return "Outward";
    case DirectionTrend::Balanced: return "Balanced";
  }
  return "?";
}

std::vector<std::size_t> node_degrees(const KgDoc& graph) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) index.emplace(graph.nodes[i].id, i);
  std::vector<std::size_t> degree(graph.nodes.size(), 0);
  for (const auto& l : graph.links) {
    auto s = index.find(l.source);
    auto t = index.find(l.target);
    if (s == index.end() || t == index.end()) {
      throw Error(Errc::IntegrityViolation, "link " + l.source + " -> " + l.target + " does not resolve");
    }
    ++degree[s->second];
    if (t->second != s->second) ++degree[t->second];
  }
  return degree;
}

std::vector<int> color_bins(const std::vector<std::size_t>& degrees, int palette_size) {
  if (palette_size < 2) throw Error(Errc::InvalidArgument, "palette size must be at least 2");
  std::vector<int> bins;
  if (degrees.empty()) return bins;
  const auto [lo, hi] = std::minmax_element(degrees.begin(), degrees.end());
  const std::size_t span = std::max<std::size_t>(1, *hi - *lo + 1);
  for (std::size_t d : degrees) {
    bins.push_back(static_cast<int>((d - *lo) * static_cast<std::size_t>(palette_size) / span));
  }
  return bins;
}

KgMetrics kg_metrics(const KnowledgeGraph& graph, int palette_size) {
  if (graph.nodes.empty()) throw Error(Errc::EmptyGraph, "goal " + std::to_string(graph.goal) + " has no nodes");
  if (palette_size < 2) throw Error(Errc::InvalidArgument, "palette size must be at least 2");
  std::vector<const KgNode*> by_order;
  for (const auto& n : graph.nodes) by_order.push_back(&n);
  std::stable_sort(by_order.begin(), by_order.end(), [](auto* a, auto* b) { return a->order < b->order; });

  KgMetrics m;
  m.goal = graph.goal;
  m.n_nodes = graph.nodes.size();
  m.n_links = graph.links.size();
  m.initial_node = by_order.front()->id;
  m.final_node = by_order.back()->id;

  const KgDoc doc = graph.doc();
  const auto degree = node_degrees(doc);
  m.max_degree = *std::max_element(degree.begin(), degree.end());
  std::map<std::string, std::size_t> deg_of;
  std::map<std::string, long long> order_of;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    deg_of[graph.nodes[i].id] = degree[i];
    order_of[graph.nodes[i].id] = graph.nodes[i].order;
  }
  for (const auto* n : by_order) {
    if (deg_of[n->id] == m.max_degree) m.most_connected.push_back(n->id);
  }
  for (const auto& l : graph.links) {
    const long long s = order_of.at(l.source);
    const long long t = order_of.at(l.target);
    if (s > t) ++m.inward_count;
    if (s < t) ++m.outward_count;
  }
  m.direction_trend = m.outward_count > m.inward_count   ? DirectionTrend::Outward
                      : m.inward_count > m.outward_count ? DirectionTrend::Inward
                                                         : DirectionTrend::Balanced;
  const auto diff = m.outward_count > m.inward_count ? m.outward_count - m.inward_count : m.inward_count - m.outward_count;
  m.mixed_direction = diff <= 2;
  const auto bins = color_bins(degree, palette_size);
  m.color_variety = static_cast<int>(std::set<int>(bins.begin(), bins.end()).size());
  return m;
}

std::string metrics_tsv(const std::vector<KgMetrics>& metrics) {
  std::string out =
      "goal\tinitial_node\tmost_connected\tfinal_node\tcolor_variety\tdirection_trend\tmixed_direction\t"
      "inward_count\toutward_count\tn_nodes\tn_links\n";
  for (const auto& m : metrics) {
    out += std::to_string(m.goal) + "\t" + m.initial_node + "\t" + join(m.most_connected, "|") + "\t" + m.final_node +
           "\t" + std::to_string(m.color_variety) + "\t" + std::string(to_string(m.direction_trend)) + "\t" +
           (m.mixed_direction ? "1" : "0") + "\t" + std::to_string(m.inward_count) + "\t" +
           std::to_string(m.outward_count) + "\t" + std::to_string(m.n_nodes) + "\t" + std::to_string(m.n_links) + "\n";
  }
  return out;
}

// ---- statistics ---------------------------------------------------------------

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sample_variance(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0 || b <= 0) throw Error(Errc::InvalidArgument, "incomplete beta needs positive shape parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_sf(double x, double d1, double d2) {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x));
}

double t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

LeveneResult levene(const std::vector<std::vector<double>>& groups, LeveneCenter center) {
  if (groups.size() < 2) throw Error(Errc::InvalidArgument, "Levene's test needs at least two groups");
  std::vector<std::vector<double>> z(groups.size());
  std::size_t n_total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) throw Error(Errc::InvalidArgument, "each group needs at least two observations");
    const double c = center == LeveneCenter::Mean ? mean_of(groups[g]) : median_of(groups[g]);
    for (double x : groups[g]) z[g].push_back(std::abs(x - c));
    n_total += groups[g].size();
  }
  const double k = static_cast<double>(groups.size());
  const double n = static_cast<double>(n_total);
  double grand = 0.0;
  for (const auto& zg : z) grand += std::accumulate(zg.begin(), zg.end(), 0.0);
  grand /= n;
  double between = 0.0, within = 0.0;
  for (const auto& zg : z) {
    const double mg = mean_of(zg);
    between += static_cast<double>(zg.size()) * (mg - grand) * (mg - grand);
    for (double v : zg) within += (v - mg) * (v - mg);
  }
  LeveneResult r;
  r.df1 = k - 1.0;
  r.df2 = n - k;
  if (within == 0.0) {
    r.w = between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.p = between == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.w = (r.df2 / r.df1) * between / within;
  r.p = f_sf(r.w, r.df1, r.df2);
  return r;
}

WelchResult welch(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw Error(Errc::InvalidArgument, "Welch's test needs two observations per group");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sample_variance(a, ma) / na, vb = sample_variance(b, mb) / nb;
  WelchResult r;
  if (va + vb == 0.0) {
    r.df = na + nb - 2.0;
    r.t = ma == mb ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    r.p = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p = std::clamp(t_two_sided_p(r.t, r.df), 0.0, 1.0);
  return r;
}

std::string_view to_string(CompareMetric metric) noexcept {
  return metric == CompareMetric::Nodes ? "nodes" : "links";
}

ComparisonReport compare_datasets(const std::vector<KnowledgeGraph>& a, const std::vector<KnowledgeGraph>& b,
                                  CompareMetric metric, LeveneCenter center) {
  const std::string label_a = a.empty() ? "first dataset" : a.front().dataset;
  const std::string label_b = b.empty() ? "second dataset" : b.front().dataset;
  require_complete(a, label_a);
  require_complete(b, label_b);
  auto values = [&](const std::vector<KnowledgeGraph>& graphs) {
    std::vector<const KnowledgeGraph*> sorted;
    for (const auto& g : graphs) sorted.push_back(&g);
    std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->goal < y->goal; });
    std::vector<double> v;
    for (const auto* g : sorted) {
      v.push_back(static_cast<double>(metric == CompareMetric::Nodes ? g->nodes.size() : g->links.size()));
    }
    return v;
  };
  const auto va = values(a), vb = values(b);
  ComparisonReport r;
  r.metric = metric;
  r.dataset_a = label_a;
  r.dataset_b = label_b;
  r.levene = levene({va, vb}, center);
  r.welch = welch(va, vb);
  r.mean_a = mean_of(va);
  r.mean_b = mean_of(vb);
  return r;
}

}  // namespace goalforge
