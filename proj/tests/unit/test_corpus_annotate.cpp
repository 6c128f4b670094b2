#include <gtest/gtest.h>

#include <random>

#include "goalforge/annotate.hpp"
#include "goalforge/corpus.hpp"
#include "goalforge/providers.hpp"
#include "goalforge/retrieval.hpp"
#include "gtest_helpers.hpp"
#include "support.hpp"

using namespace goalforge;

namespace {

TalkRecord talk(const std::string& id, const std::string& transcript) {
  TalkRecord r;
  r.video_id = id;
  r.title = "Talk " + id;
  r.transcript = transcript;
  r.usable = true;
  return r;
}

AnnotationDoc valid_doc() {
  AnnotationDoc d;
  d.title = "T";
  d.description = "D";
  d.core_value = "C";
  d.key_words = {"water"};
  for (int i = 0; i < 5; ++i) d.qa.push_back({"q" + std::to_string(i), "a"});
  d.sdg_types = {6, 3, 6};
  return d;
}

}  // namespace

TEST(Corpus, WindowsAreClosedIntervals) {
  const auto w = CorpusWindow::preliminary();
  EXPECT_TRUE(w.contains(parse_iso8601("2023-01-01T00:00:00Z")));
  EXPECT_TRUE(w.contains(parse_iso8601("2023-12-31T23:59:59Z")));
  EXPECT_FALSE(w.contains(parse_iso8601("2024-01-01T00:00:00Z")));
  EXPECT_FALSE(w.contains(parse_iso8601("2022-12-31T23:59:59Z")));
  EXPECT_EQ(CorpusWindow::formal().to_string(), "2020-01-01..2024-04-30");
  EXPECT_EQ(CorpusWindow::parse("2021-02-03..2021-03-04", "x").to_string(), "2021-02-03..2021-03-04");
  EXPECT_ERRC(CorpusWindow::parse("2021-03-04..2021-02-03", "x"), Errc::InvalidArgument);
  EXPECT_FALSE(CorpusWindow::named("other"));
}

TEST(Corpus, DurationBoundsInclusive) {
  EXPECT_FALSE(duration_ok(std::chrono::seconds(239)));
  EXPECT_TRUE(duration_ok(kMinDuration));
  EXPECT_TRUE(duration_ok(kMaxDuration));
  EXPECT_FALSE(duration_ok(std::chrono::seconds(1201)));
}

TEST(Corpus, FixtureIngestAppliesEveryFilter) {
  gftest::TempDir dir;
  auto spec = gftest::mini_corpus_spec();
  spec.talks = 5;
  gftest::write_corpus(dir.path(), gftest::generate_corpus(spec));
  FixtureSource source(dir.path());
  const auto records = ingest(source, spec.window);
  const auto summary = summarize(records);
  // 5 regular talks + 4 in-window edge cases; the early one is never collected.
  EXPECT_EQ(summary.collected, 9u);
  EXPECT_EQ(summary.usable, 5u);
  EXPECT_EQ(summary.skipped_by_reason.at(SkipReason::BadDuration), 1u);
  EXPECT_EQ(summary.skipped_by_reason.at(SkipReason::MemberOnly), 1u);
  EXPECT_EQ(summary.skipped_by_reason.at(SkipReason::NonEnglish), 1u);
  EXPECT_EQ(summary.skipped_by_reason.at(SkipReason::NoTranscript), 1u);
  EXPECT_TRUE(std::is_sorted(records.begin(), records.end(),
                             [](const auto& a, const auto& b) { return a.video_id < b.video_id; }));
  for (const auto& r : records) EXPECT_EQ(r.usable, r.transcript.has_value()) << r.video_id;
}

TEST(Corpus, FixtureRoundTrip) {
  gftest::TempDir dir;
  auto r = talk("abc", "hello world\n");
  r.published_at = parse_iso8601("2023-05-05T10:00:00Z");
  r.duration = std::chrono::seconds(600);
  r.channel = "TED";
  r.caption_language = "en";
  r.usable = false;
  write_fixture(dir.path(), r);
  auto back = read_fixture_metadata(dir / "abc.json");
  EXPECT_EQ(back.video_id, "abc");
  EXPECT_EQ(back.published_at, r.published_at);
  EXPECT_EQ(back.duration, r.duration);
  EXPECT_EQ(FixtureSource(dir.path()).fetch_transcript(back).transcript, "hello world\n");
}

TEST(Corpus, RecordingSourceMirrorsIntoFixtures) {
  gftest::TempDir src, mirror;
  auto spec = gftest::mini_corpus_spec();
  spec.talks = 3;
  spec.edge_cases = false;
  gftest::write_corpus(src.path(), gftest::generate_corpus(spec));
  auto inner = std::make_shared<FixtureSource>(src.path());
  RecordingSource recording(inner, mirror.path());
  const auto first = ingest(recording, spec.window);
  FixtureSource replay(mirror.path());
  EXPECT_EQ(ingest(replay, spec.window), first);
}

TEST(Corpus, SkipReasonNamesRoundTrip) {
  for (auto r : {SkipReason::NoTranscript, SkipReason::MemberOnly, SkipReason::NonEnglish, SkipReason::OutOfWindow,
                 SkipReason::BadDuration, SkipReason::AnnotationFailed, SkipReason::SafetyBlocked}) {
    EXPECT_EQ(skip_reason_from_string(to_string(r)), r);
  }
  EXPECT_EQ(skip_reason_from_string("nope"), std::nullopt);
}

// ---- annotate -------------------------------------------------------------------

TEST(Annotate, ValidationRules) {
  const auto& cat = gftest::resources().catalog;
  const auto ok = validate_annotation(valid_doc(), "v", cat);
  EXPECT_EQ(ok.sdg_types, (std::set<int>{3, 6}));

  auto four = valid_doc();
  four.qa.pop_back();
  EXPECT_ERRC(validate_annotation(four, "v", cat), Errc::SchemaViolation);

  auto bad_goal = valid_doc();
  bad_goal.sdg_types = {3, 18};
  try {
    validate_annotation(bad_goal, "v", cat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.path(), "sdg_types[1]");
  }
  auto no_tags = valid_doc();
  no_tags.sdg_types.clear();
  EXPECT_ERRC(validate_annotation(no_tags, "v", cat), Errc::SchemaViolation);
  auto blank_answer = valid_doc();
  blank_answer.qa[2].answer = "  ";
  EXPECT_ERRC(validate_annotation(blank_answer, "v", cat), Errc::SchemaViolation);
}

TEST(Annotate, TedtalkDataOmitsCatalogKeywords) {
  const auto data = tedtalk_data(talk("v", "a story"));
  EXPECT_NE(data.find("Talk v"), std::string::npos);
  EXPECT_NE(data.find("a story"), std::string::npos);
  EXPECT_EQ(data.find("Keywords"), std::string::npos);
}

TEST(Annotate, CorrectiveRecoversOnce) {
  auto gw = gftest::mock_gateway();
  const auto out = annotate_talk(talk("v", "health and hospital care\n[[mock:annotation-invalid-once]]\n"), *gw,
                                 gftest::resources().prompts, gftest::resources().catalog);
  ASSERT_TRUE(out.annotation);
  EXPECT_EQ(out.prompts_issued, 2);
  EXPECT_EQ(out.annotation->qa.size(), kQaPairs);
}

TEST(Annotate, PersistentFailureAndSafetyBecomeSkips) {
  auto gw = gftest::mock_gateway();
  const auto& res = gftest::resources();
  const auto bad = annotate_talk(talk("v", "health\n[[mock:annotation-invalid]]\n"), *gw, res.prompts, res.catalog);
  EXPECT_FALSE(bad.annotation);
  EXPECT_EQ(bad.skip, SkipReason::AnnotationFailed);
  EXPECT_EQ(bad.prompts_issued, 2);
  const auto blocked = annotate_talk(talk("v", "health [[mock:safety-block]]"), *gw, res.prompts, res.catalog);
  EXPECT_EQ(blocked.skip, SkipReason::SafetyBlocked);
}

TEST(Annotate, ScriptedProviderErrorsPropagate) {
  auto scripted = std::make_shared<ScriptedProvider>();
  scripted->push_error(Error(Errc::AuthError, "no key"));
  Gateway gw(scripted, ProviderConfig{}, [](auto) {});
  EXPECT_ERRC(annotate_talk(talk("v", "x"), gw, gftest::resources().prompts, gftest::resources().catalog),
              Errc::AuthError);
}

TEST(Annotate, TagStatistics) {
  const auto s = tag_statistics({{1, 3}, {3}, {3, 10, 16}});
  EXPECT_EQ(s.talks, 3u);
  EXPECT_EQ(s.total_tags, 6u);
  EXPECT_DOUBLE_EQ(s.mean_tags_per_talk, 2.0);
  EXPECT_EQ(s.per_goal_counts[3], 3u);
  EXPECT_EQ(s.per_goal_counts[16], 1u);
  EXPECT_ERRC(tag_statistics({}), Errc::EmptyDataset);
}

// ---- retrieval ------------------------------------------------------------------

namespace {

Embedding unit(std::initializer_list<double> xs) {
  Embedding v(xs);
  normalize(v);
  return v;
}

}  // namespace

TEST(Retrieval, IndexRejectsBadVectors) {
  EmbeddingIndex idx("m", 1);
  idx.add("a", unit({1, 0}));
  EXPECT_ERRC(idx.add("a", unit({0, 1})), Errc::InvalidArgument);
  EXPECT_ERRC(idx.add("b", unit({1, 0, 0})), Errc::InvalidArgument);
  EXPECT_ERRC(idx.add("c", Embedding{2, 0}), Errc::InvalidArgument);
}

TEST(Retrieval, IndexSaveLoadRoundTrip) {
  gftest::TempDir dir;
  EmbeddingIndex idx("model-x", 9);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    Embedding v(16);
    for (auto& x : v) x = n(rng);
    normalize(v);
    idx.add("id" + std::to_string(i), v);
  }
  idx.save(dir / "index.bin");
  EXPECT_EQ(EmbeddingIndex::load(dir / "index.bin"), idx);
}

TEST(Retrieval, RankingOrderTiesAndCap) {
  EmbeddingIndex idx("m", std::nullopt);
  idx.add("b", unit({1, 0}));
  idx.add("a", unit({1, 0}));
  idx.add("c", unit({0.6, 0.8}));
  idx.add("d", unit({0, 1}));
  std::map<std::string, std::set<int>> tags{{"a", {4}}, {"b", {4}}, {"c", {4}}, {"d", {5}}};
  const auto set = rank_participants(4, unit({1, 0}), idx, tags, 25);
  EXPECT_EQ(set.members, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_NEAR(set.scores[2], 0.6, 1e-12);
  EXPECT_EQ(rank_participants(4, unit({1, 0}), idx, tags, 2).members.size(), 2u);
  EXPECT_ERRC(rank_participants(7, unit({1, 0}), idx, tags, 25), Errc::NoCandidates);
}

TEST(Retrieval, BuildIndexAndSelectWithMock) {
  auto gw = gftest::mock_gateway();
  const auto& cat = gftest::resources().catalog;
  std::vector<TalkAnnotation> anns;
  std::map<std::string, std::set<int>> tags;
  for (int i = 0; i < 6; ++i) {
    TalkAnnotation a;
    a.video_id = "t" + std::to_string(i);
    a.title = i % 2 ? "Clean water for villages" : "Hospitals and health";
    a.description = a.title;
    a.core_value = "care";
    a.key_words = {i % 2 ? "water" : "health"};
    a.sdg_types = {i % 2 ? 6 : 3};
    tags[a.video_id] = a.sdg_types;
    anns.push_back(a);
  }
  const auto build = build_index(anns, *gw, 4);
  EXPECT_EQ(build.index.size(), 6u);
  EXPECT_TRUE(build.skipped.empty());
  const auto set = select_participants(6, build.index, tags, cat, *gw);
  EXPECT_EQ(set.members, (std::vector<std::string>{"t1", "t3", "t5"}));
  EXPECT_TRUE(std::is_sorted(set.scores.rbegin(), set.scores.rend()));
  EXPECT_ERRC(build_index({}, *gw), Errc::EmptyDataset);
}
