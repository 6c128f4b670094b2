#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "goalforge/analytics.hpp"
#include "goalforge/importers.hpp"
#include "goalforge/util.hpp"
#include "gtest_helpers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace goalforge;

namespace {

const std::vector<KnowledgeGraph>& graphs(const std::string& dataset) {
  static const auto pre = read_graph_dir(gftest::fixtures_dir() / "graphs" / "preliminary", "preliminary");
  static const auto formal = read_graph_dir(gftest::fixtures_dir() / "graphs" / "formal", "formal");
  return dataset == "formal" ? formal : pre;
}

KnowledgeGraph chain(std::initializer_list<const char*> ids, std::vector<std::pair<int, int>> edges) {
  KnowledgeGraph g;
  g.goal = 1;
  long long order = 1;
  for (const char* id : ids) g.nodes.push_back({id, order++, ""});
  for (auto [s, t] : edges) g.links.push_back({g.nodes[s].id, g.nodes[t].id, "r"});
  return g;
}

}  // namespace

// ---- co-occurrence --------------------------------------------------------------

TEST(Cooccurrence, MatchesNaiveOracleOnRandomDatabases) {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 200; ++round) {
    const auto db = gftest::random_tag_db(rng, 50);
    const auto m = cooccurrence(db);
    const auto want = gftest::naive_cooccurrence(db);
    for (int i = 1; i <= 17; ++i) {
      for (int j = 1; j <= 17; ++j) {
        ASSERT_EQ(m.at(i, j), want[i - 1][j - 1]) << "round " << round << " cell " << i << "," << j;
        ASSERT_EQ(m.at(i, j), m.at(j, i));
        ASSERT_LE(m.at(i, j), std::min(m.at(i, i), m.at(j, j)));
      }
    }
  }
}

TEST(Cooccurrence, SingleOnlyDiagonal) {
  const auto m = cooccurrence({{3}, {3, 4}, {4}}, "d", DiagonalMode::SingleOnly);
  EXPECT_EQ(m.at(3, 3), 1u);
  EXPECT_EQ(m.at(4, 4), 1u);
  EXPECT_EQ(m.at(3, 4), 1u);
}

TEST(Cooccurrence, Errors) {
  EXPECT_ERRC(cooccurrence({}), Errc::EmptyDataset);
  EXPECT_ERRC(cooccurrence({{0}}), Errc::InvalidArgument);
  EXPECT_ERRC(cooccurrence({{18}}), Errc::InvalidArgument);
}

TEST(Cooccurrence, TagFixtures) {
  const auto pre = read_tag_table(gftest::fixtures_dir() / "tags" / "preliminary.tsv");
  const auto mp = cooccurrence(pre.tags, pre.dataset);
  EXPECT_EQ(mp.talks, 269u);
  EXPECT_EQ(mp.at(10, 10), 115u);
  EXPECT_EQ(mp.at(10, 16), 71u);

  const auto formal = read_tag_table(gftest::fixtures_dir() / "tags" / "formal.tsv");
  const auto mf = cooccurrence(formal.tags, formal.dataset);
  EXPECT_EQ(mf.talks, 1127u);
  EXPECT_EQ(mf.at(10, 10), 521u);
  EXPECT_EQ(mf.at(10, 16), 298u);
  EXPECT_EQ(mf.at(6, 6), 12u);
  const auto zeros = zero_pair_report(mf);
  for (auto [a, b] : {std::pair{4, 14}, {5, 7}, {5, 14}, {6, 8}}) {
    EXPECT_NE(std::find_if(zeros.begin(), zeros.end(), [&](const ZeroPair& z) { return z.a == a && z.b == b; }),
              zeros.end())
        << a << "," << b;
  }
}

TEST(Cooccurrence, TagTableRoundTrip) {
  gftest::TempDir dir;
  TagTable t{"custom_set", {"v1", "v2"}, {{1, 2}, {17}}};
  write_file(dir / "t.tsv", write_tag_table(t));
  const auto back = read_tag_table(dir / "t.tsv");
  EXPECT_EQ(back.dataset, "custom_set");
  EXPECT_EQ(back.video_ids, t.video_ids);
  EXPECT_EQ(back.tags, t.tags);
  write_file(dir / "bad.tsv", "video_id\tsdg_types\nv1\t1,x\n");
  EXPECT_ERRC(read_tag_table(dir / "bad.tsv"), Errc::ParseError);
}

TEST(Cooccurrence, AttributeNetworkAndTsv) {
  const auto m = cooccurrence({{1, 2}, {1, 2}, {2, 3}, {5}});
  const auto net = attribute_network(m);
  EXPECT_EQ(net.nodes, (std::vector<int>{1, 2, 3, 5}));
  EXPECT_EQ(net.edges, (std::vector<AttributeEdge>{{1, 2, 2}, {2, 3, 1}}));
  EXPECT_EQ(attribute_network(m, 2).edges.size(), 1u);
  const auto tsv = matrix_tsv(m);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 18);
}

TEST(Heatmap, ColourRampAndDeterminism) {
  EXPECT_EQ(heatmap_color(0, 10), "#f7fbff");
  EXPECT_EQ(heatmap_color(10, 10), "#08306b");
  EXPECT_EQ(heatmap_color(0, 0), "#f7fbff");
  const auto m = cooccurrence({{1, 2}, {3}});
  const auto svg = heatmap_svg(m);
  EXPECT_EQ(svg, heatmap_svg(m));
  EXPECT_TRUE(svg.starts_with("<svg") || svg.starts_with("<?xml"));
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 0, true);
}

// ---- graph metrics --------------------------------------------------------------

TEST(Metrics, DegreesAndColourBins) {
  const auto g = chain({"A", "B", "C", "D"}, {{0, 1}, {0, 2}, {0, 3}, {3, 3}});
  EXPECT_EQ(node_degrees(g.doc()), (std::vector<std::size_t>{3, 1, 1, 2}));
  EXPECT_EQ(color_bins({1, 2, 3}, 8), (std::vector<int>{0, 2, 5}));
  EXPECT_EQ(color_bins({4, 4}, 8), (std::vector<int>{0, 0}));
  EXPECT_ERRC(kg_metrics(g, 1), Errc::InvalidArgument);
}

TEST(Metrics, DirectionTrend) {
  // Links from later to earlier nodes point inward.
  const auto inward = chain({"A", "B", "C"}, {{1, 0}, {2, 0}, {2, 1}});
  const auto m = kg_metrics(inward);
  EXPECT_EQ(m.direction_trend, DirectionTrend::Inward);
  EXPECT_EQ(m.inward_count, 3u);
  EXPECT_EQ(m.initial_node, "A");
  EXPECT_EQ(m.final_node, "C");
  EXPECT_EQ(m.most_connected, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_TRUE(m.mixed_direction == false || m.outward_count + 2 >= m.inward_count);
  const auto balanced = chain({"A", "B"}, {{0, 1}, {1, 0}});
  EXPECT_EQ(kg_metrics(balanced).direction_trend, DirectionTrend::Balanced);
  EXPECT_TRUE(kg_metrics(balanced).mixed_direction);
}

class MetricsReference : public ::testing::TestWithParam<std::string> {};

TEST_P(MetricsReference, MatchesPublishedRows) {
  std::ifstream in(gftest::fixtures_dir() / "graphs" / "reference.tsv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto f = split(line, '\t');
    if (f.at(0) != GetParam()) continue;
    const int goal = std::stoi(f[1]);
    const auto m = kg_metrics(graphs(GetParam()).at(static_cast<std::size_t>(goal - 1)));
    SCOPED_TRACE(GetParam() + " goal " + f[1]);
    EXPECT_EQ(m.initial_node, f[2]);
    // The published listing order is arbitrary; compare as sets.
    const auto listed = split(f[3], '|');
    EXPECT_EQ(std::set<std::string>(m.most_connected.begin(), m.most_connected.end()),
              std::set<std::string>(listed.begin(), listed.end()));
    EXPECT_EQ(m.final_node, f[4]);
    if (f[6] == "1") EXPECT_EQ(m.color_variety, std::stoi(f[5]));
    EXPECT_EQ(std::string(to_string(m.direction_trend)), f[7]);
    EXPECT_EQ(m.mixed_direction, f[8] == "1");
    EXPECT_EQ(m.n_nodes, std::stoul(f[9]));
    EXPECT_EQ(m.n_links, std::stoul(f[10]));
    ++rows;
  }
  EXPECT_EQ(rows, 17);
}

INSTANTIATE_TEST_SUITE_P(Datasets, MetricsReference, ::testing::Values("preliminary", "formal"));

// ---- statistics -----------------------------------------------------------------

TEST(Stats, IncompleteBetaKnownValues) {
  EXPECT_NEAR(incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(incomplete_beta(2, 3, 0.4), 0.5248, 1e-12);
  EXPECT_EQ(incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(Stats, MatchReferenceOnRandomFixtures) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> size(5, 40);
  std::uniform_real_distribution<double> shift(-5, 5), scale(0.5, 6);
  for (int round = 0; round < 50; ++round) {
    std::normal_distribution<double> da(shift(rng), scale(rng)), db(shift(rng), scale(rng));
    std::vector<double> a(static_cast<std::size_t>(size(rng))), b(static_cast<std::size_t>(size(rng)));
    for (auto& x : a) x = std::round(da(rng) * 4) / 4;
    for (auto& x : b) x = std::round(db(rng) * 4) / 4;
    const auto lv = levene({a, b});
    const auto rl = gftest::reference_levene({a, b});
    ASSERT_NEAR(lv.w, rl.w, 1e-9 * std::max(1.0, rl.w)) << round;
    ASSERT_NEAR(lv.p, rl.p, 1e-9) << round;
    const auto wt = welch(a, b);
    const auto rw = gftest::reference_welch(a, b);
    ASSERT_NEAR(wt.t, rw.t, 1e-9 * std::max(1.0, std::fabs(rw.t))) << round;
    ASSERT_NEAR(wt.df, rw.df, 1e-9 * rw.df) << round;
    ASSERT_NEAR(wt.p, rw.p, 1e-9) << round;
  }
}

TEST(Stats, DegenerateInputs) {
  const std::vector<double> same{3, 3, 3, 3};
  const auto w = welch(same, same);
  EXPECT_EQ(w.t, 0.0);
  EXPECT_EQ(w.p, 1.0);
  const auto l = levene({same, same});
  EXPECT_EQ(l.w, 0.0);
  EXPECT_EQ(l.p, 1.0);
  const auto apart = welch(same, {5, 5, 5});
  EXPECT_TRUE(std::isinf(apart.t));
  EXPECT_EQ(apart.p, 0.0);
  const std::vector<double> x{1, 2, 3, 4};
  const auto twin = welch(x, x);
  EXPECT_EQ(twin.t, 0.0);
  EXPECT_NEAR(twin.p, 1.0, 1e-15);
  EXPECT_ERRC(welch({1}, {1, 2}), Errc::InvalidArgument);
  EXPECT_ERRC(levene({{1, 2}}), Errc::InvalidArgument);
}

TEST(Stats, MedianCentre) {
  const auto l = levene({{1, 2, 3, 10}, {4, 5, 6, 7}}, LeveneCenter::Median);
  EXPECT_GT(l.w, 0.0);
  EXPECT_EQ(l.df1, 1.0);
  EXPECT_EQ(l.df2, 6.0);
}

TEST(Stats, DatasetComparison) {
  const auto nodes = compare_datasets(graphs("preliminary"), graphs("formal"), CompareMetric::Nodes);
  EXPECT_NEAR(nodes.levene.w, 8.0148, 1e-3);
  EXPECT_NEAR(std::fabs(nodes.welch.t), 0.83069, 1e-4);
  EXPECT_NEAR(nodes.welch.df, 22.2309, 1e-3);
  EXPECT_NEAR(nodes.welch.p, 0.415, 0.05);
  const auto links = compare_datasets(graphs("preliminary"), graphs("formal"), CompareMetric::Links);
  EXPECT_NEAR(links.levene.w, 6.3058, 1e-3);
  EXPECT_NEAR(links.welch.p, 0.570, 0.05);
  EXPECT_NEAR(nodes.mean_a, 17.706, 1e-3);
}
