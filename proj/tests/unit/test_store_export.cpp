#include <gtest/gtest.h>

#include <sqlite3.h>

#include <nlohmann/json.hpp>

#include "goalforge/export.hpp"
#include "goalforge/importers.hpp"
#include "goalforge/pipeline.hpp"
#include "goalforge/store.hpp"
#include "goalforge/util.hpp"
#include "gtest_helpers.hpp"
#include "support.hpp"

using namespace goalforge;
namespace fs = std::filesystem;

namespace {

const std::vector<KnowledgeGraph>& fixture_graphs() {
  static const auto g = read_graph_dir(gftest::fixtures_dir() / "graphs" / "preliminary", "preliminary");
  return g;
}

TalkRecord usable_talk(const std::string& id) {
  TalkRecord r;
  r.video_id = id;
  r.title = "T " + id;
  r.published_at = parse_iso8601("2023-03-03T12:00:00Z");
  r.duration = std::chrono::seconds(500);
  r.transcript = "text " + id;
  r.channel = "TED";
  r.caption_language = "en";
  r.usable = true;
  return r;
}

TalkAnnotation ann(const std::string& id, std::set<int> tags) {
  TalkAnnotation a;
  a.video_id = id;
  a.title = "T " + id;
  a.description = "d";
  a.core_value = "c";
  a.key_words = {"k"};
  for (int i = 0; i < 5; ++i) a.qa.push_back({"q", "a"});
  a.sdg_types = std::move(tags);
  return a;
}

void exec(const fs::path& db, const std::string& sql) {
  sqlite3* h = nullptr;
  ASSERT_EQ(sqlite3_open(db.c_str(), &h), SQLITE_OK);
  ASSERT_EQ(sqlite3_exec(h, sql.c_str(), nullptr, nullptr, nullptr), SQLITE_OK) << sqlite3_errmsg(h);
  sqlite3_close(h);
}

BundleInputs bundle_inputs() {
  BundleInputs in;
  in.dataset = "preliminary";
  in.seed = 7;
  in.provider = "mock";
  in.graphs = fixture_graphs();
  in.proposals = read_proposals(gftest::fixtures_dir() / "proposals" / "preliminary.md");
  in.tag_sets = {{1, 3}, {3, 10}, {10}};
  return in;
}

}  // namespace

// ---- store ----------------------------------------------------------------------

TEST(Store, TableSuffixes) {
  EXPECT_EQ(table_suffix("preliminary"), "");
  EXPECT_EQ(table_suffix("formal"), "2");
  EXPECT_EQ(table_suffix("pilot_3"), "_pilot_3");
  EXPECT_ERRC(table_suffix("Bad-Name"), Errc::InvalidArgument);
  EXPECT_ERRC(table_suffix(""), Errc::InvalidArgument);
}

TEST(Store, OpenIsIdempotentAndRejectsNewerSchema) {
  gftest::TempDir dir;
  const auto db = dir / "s.db";
  {
    auto s = Store::open(db);
    EXPECT_EQ(s.schema_version(), kStoreSchemaVersion);
    s.ensure_dataset("preliminary");
    s.ensure_dataset("preliminary");
  }
  {
    auto s = Store::open(db);
    // The two named datasets are always registered.
    EXPECT_EQ(s.datasets(), (std::vector<std::string>{"formal", "preliminary"}));
  }
  exec(db, "PRAGMA user_version = 99;");
  EXPECT_ERRC(Store::open(db), Errc::IncompatibleVersion);
}

TEST(Store, TalkAndAnnotationRoundTrip) {
  gftest::TempDir dir;
  auto s = Store::open(dir / "s.db");
  s.put_talks("preliminary", {usable_talk("b"), usable_talk("a")});
  EXPECT_ERRC(s.put_annotation("preliminary", ann("zzz", {1})), Errc::IntegrityViolation);
  RunMetadata meta{"mock", "m", 3, "2024-01-01T00:00:00Z", "abc"};
  s.put_annotation("preliminary", ann("a", {3, 10}), Origin::Generated, meta);
  const auto talks = s.talks("preliminary");
  ASSERT_EQ(talks.size(), 2u);
  EXPECT_EQ(talks[0], usable_talk("a"));
  const auto stored = s.annotations("preliminary");
  ASSERT_EQ(stored.size(), 1u);
  EXPECT_EQ(stored[0].annotation, ann("a", {3, 10}));
  EXPECT_EQ(stored[0].metadata, meta);

  s.mark_skipped("preliminary", "b", SkipReason::AnnotationFailed);
  const auto after = s.talks("preliminary");
  EXPECT_FALSE(after[1].usable);
  EXPECT_EQ(after[1].skip_reason, SkipReason::AnnotationFailed);
  const auto c = s.counts("preliminary");
  EXPECT_EQ(c.talks, 2u);
  EXPECT_EQ(c.usable_talks, 1u);
  EXPECT_EQ(c.annotations, 1u);
}

TEST(Store, GraphsNeedTranscriptsAndProposalsNeedGraphs) {
  gftest::TempDir dir;
  auto s = Store::open(dir / "s.db");
  const auto& g = fixture_graphs()[2];
  EXPECT_ERRC(s.put_graph(g), Errc::IntegrityViolation);
  s.put_transcript_failure("preliminary", 3, "boom");
  EXPECT_ERRC(s.put_graph(g), Errc::IntegrityViolation);
  RoundtableTranscript t;
  t.goal = 3;
  t.dataset = "preliminary";
  t.text = "Moderator: hi";
  t.word_count = 2;
  t.participant_ids = {"x"};
  s.put_transcript(t);
  s.put_graph(g);
  EXPECT_EQ(s.graphs("preliminary"), (std::vector<KnowledgeGraph>{g}));
  EXPECT_EQ(s.transcript("preliminary", 3)->transcript, t);

  const auto proposals = read_proposals(gftest::fixtures_dir() / "proposals" / "preliminary.md");
  EXPECT_ERRC(s.put_proposals("preliminary", proposals), Errc::IntegrityViolation);
}

TEST(Store, ImportsRoundTripAndClearFrom) {
  gftest::TempDir dir;
  auto s = Store::open(dir / "s.db");
  const auto tags = read_tag_table(gftest::fixtures_dir() / "tags" / "preliminary.tsv");
  EXPECT_EQ(import_tags(s, tags, "preliminary"), 269u);
  EXPECT_EQ(import_graphs(s, fixture_graphs(), "preliminary"), 17u);
  const auto proposals = read_proposals(gftest::fixtures_dir() / "proposals" / "preliminary.md");
  EXPECT_EQ(import_proposals(s, proposals, "preliminary"), 1u);
  EXPECT_EQ(s.graphs("preliminary"), fixture_graphs());
  EXPECT_EQ(s.proposals("preliminary"), proposals);
  const auto stored = s.annotations("preliminary");
  ASSERT_EQ(stored.size(), 269u);
  EXPECT_EQ(stored[0].origin, Origin::Imported);

  s.clear_from("preliminary", Store::Stage::Graphs);
  const auto c = s.counts("preliminary");
  EXPECT_EQ(c.graphs, 0u);
  EXPECT_EQ(c.proposals, 0u);
  EXPECT_EQ(c.transcripts, 17u);
  EXPECT_EQ(c.annotations, 269u);
}

TEST(Store, DatasetsAreIsolated) {
  gftest::TempDir dir;
  auto s = Store::open(dir / "s.db");
  s.put_talks("preliminary", {usable_talk("a")});
  s.put_talks("formal", {usable_talk("a"), usable_talk("b")});
  s.put_talks("pilot", {usable_talk("c")});
  EXPECT_EQ(s.talks("preliminary").size(), 1u);
  EXPECT_EQ(s.talks("formal").size(), 2u);
  EXPECT_EQ(s.talks("pilot").size(), 1u);
  EXPECT_EQ(s.datasets().size(), 3u);
}

TEST(Store, SnapshotIsPointInTime) {
  gftest::TempDir dir;
  auto s = Store::open(dir / "s.db");
  s.put_talks("preliminary", {usable_talk("a")});
  auto snap = s.snapshot();
  s.put_talks("preliminary", {usable_talk("a"), usable_talk("b")});
  EXPECT_EQ(snap.talks("preliminary").size(), 1u);
  EXPECT_EQ(s.talks("preliminary").size(), 2u);
}

// ---- export ---------------------------------------------------------------------

TEST(Export, BundleContentsAndDeterminism) {
  const auto& cat = gftest::resources().catalog;
  const auto files = build_bundle(bundle_inputs(), cat);
  EXPECT_EQ(files, build_bundle(bundle_inputs(), cat));
  for (const char* f : {"manifest.json", "metrics.json", "metrics.tsv", "new-goals.json", "cooccurrence.json",
                        "cooccurrence.tsv", "heatmap.svg", "attribute-network.json", "graphs/goal-01.json",
                        "graphs/goal-17.json"}) {
    EXPECT_TRUE(files.contains(f)) << f;
  }
  const auto manifest = nlohmann::json::parse(files.at("manifest.json"));
  EXPECT_EQ(manifest["schema_version"], kBundleSchemaVersion);
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["files"].size(), files.size() - 1);
  for (const auto& entry : manifest["files"]) {
    const auto& body = files.at(entry["path"].get<std::string>());
    EXPECT_EQ(entry["sha256"], sha256_hex(body));
    EXPECT_EQ(entry["bytes"], body.size());
  }
  const auto g1 = nlohmann::json::parse(files.at("graphs/goal-01.json"));
  EXPECT_EQ(g1["nodes"].size(), 24u);
  EXPECT_TRUE(g1["nodes"][0].contains("degree"));
  EXPECT_TRUE(g1["nodes"][0].contains("color_bin"));
  const auto ng = nlohmann::json::parse(files.at("new-goals.json"));
  ASSERT_EQ(ng["proposals"].size(), 1u);
  EXPECT_TRUE(ng["proposals"][0]["sub_goals"].is_array());
  EXPECT_EQ(ng["proposals"][0]["sub_goals"][0]["indicators"].size(), 2u);
}

TEST(Export, NoTagsMeansNoCooccurrenceFiles) {
  auto in = bundle_inputs();
  in.tag_sets.clear();
  const auto files = build_bundle(in, gftest::resources().catalog);
  EXPECT_FALSE(files.contains("cooccurrence.json"));
  EXPECT_FALSE(files.contains("heatmap.svg"));
  in.graphs.pop_back();
  EXPECT_ERRC(build_bundle(in, gftest::resources().catalog), Errc::IncompleteDataset);
}

TEST(Export, WriteVerifyAndDetectTampering) {
  gftest::TempDir dir;
  const auto out = dir / "site";
  fs::create_directories(out);
  write_file(out / "stale.json", "{}");
  write_file(out / "keep.txt", "not ours");
  const auto files = build_bundle(bundle_inputs(), gftest::resources().catalog);
  write_file(out / "manifest.json", files.at("manifest.json"));
  write_bundle(out, files);
  EXPECT_NO_THROW(verify_bundle(out));
  EXPECT_TRUE(fs::exists(out / "keep.txt"));
  write_file(out / "metrics.tsv", "tampered");
  EXPECT_ERRC(verify_bundle(out), Errc::IntegrityViolation);
  fs::remove(out / "metrics.tsv");
  EXPECT_ERRC(verify_bundle(out), Errc::IntegrityViolation);
}

// ---- pipeline -------------------------------------------------------------------

TEST(Pipeline, StageNames) {
  for (auto s : all_stages()) EXPECT_EQ(stage_from_string(to_string(s)), s);
  EXPECT_EQ(stage_from_string("export-site"), Stage::Export);
  EXPECT_EQ(stage_from_string("nope"), std::nullopt);
}

TEST(Pipeline, MissingPrerequisites) {
  gftest::TempDir dir;
  PipelineConfig cfg;
  cfg.store_path = dir / "s.db";
  cfg.work_dir = dir / "work";
  cfg.out_dir = dir / "site";
  cfg.timestamp = "2024-01-01T00:00:00Z";
  auto store = Store::open(cfg.store_path);
  auto gw = gftest::mock_gateway();
  for (auto stage : {Stage::Annotate, Stage::Index, Stage::Simulate, Stage::Extract, Stage::Synthesize,
                     Stage::Analyze, Stage::Export}) {
    SCOPED_TRACE(std::string(to_string(stage)));
    EXPECT_ERRC(run_stage(stage, cfg, store, *gw, gftest::resources()), Errc::StagePrerequisiteMissing);
  }
  const auto report = run_pipeline({Stage::Simulate, Stage::Extract}, cfg, store, *gw, gftest::resources());
  EXPECT_FALSE(report.ok());
  ASSERT_EQ(report.stages.size(), 1u);
  EXPECT_EQ(report.stages[0].error_code, Errc::StagePrerequisiteMissing);
  EXPECT_NO_THROW(static_cast<void>(nlohmann::json::parse(report.to_json())));
}

TEST(Pipeline, ImportedArtifactsFeedAnalyzeAndExport) {
  gftest::TempDir dir;
  PipelineConfig cfg;
  cfg.store_path = dir / "s.db";
  cfg.work_dir = dir / "work";
  cfg.out_dir = dir / "site";
  cfg.timestamp = "2024-01-01T00:00:00Z";
  auto store = Store::open(cfg.store_path);
  import_tags(store, read_tag_table(gftest::fixtures_dir() / "tags" / "preliminary.tsv"), "preliminary");
  import_graphs(store, fixture_graphs(), "preliminary");
  auto gw = gftest::mock_gateway();
  const auto report = run_pipeline({Stage::Analyze, Stage::Export}, cfg, store, *gw, gftest::resources());
  ASSERT_TRUE(report.ok()) << report.to_json();
  EXPECT_TRUE(fs::exists(analysis_dir(cfg) / "metrics.tsv"));
  EXPECT_NO_THROW(verify_bundle(cfg.out_dir));
}
