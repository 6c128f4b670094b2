#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "fake_server.hpp"
#include "goalforge/corpus.hpp"
#include "goalforge/providers.hpp"
#include "gtest_helpers.hpp"

using namespace goalforge;
using gftest::FakeRequest;
using gftest::FakeResponse;
using gftest::FakeServer;
using nlohmann::json;

namespace {

std::string path_of(const std::string& target) { return target.substr(0, target.find('?')); }

std::string query_value(const std::string& target, const std::string& key) {
  const auto q = target.find('?');
  if (q == std::string::npos) return {};
  const std::string needle = key + "=";
  for (std::size_t pos = q + 1; pos < target.size();) {
    auto end = target.find('&', pos);
    if (end == std::string::npos) end = target.size();
    if (target.compare(pos, needle.size(), needle) == 0) return target.substr(pos + needle.size(), end - pos - needle.size());
    pos = end + 1;
  }
  return {};
}

json candidate_reply(const std::string& text) {
  json part = {{"text", text}};
  json candidate;
  candidate["content"]["parts"] = json::array({part});
  candidate["finishReason"] = "STOP";
  json out;
  out["candidates"] = json::array({candidate});
  return out;
}

}  // namespace

// ---- generation provider --------------------------------------------------------

TEST(GeminiProvider, GenerateSendsPromptAndReadsCandidate) {
  FakeServer server([](const FakeRequest&) { return FakeResponse{200, candidate_reply("hello back").dump()}; });
  auto provider = std::make_shared<GeminiProvider>("k-123", server.base_url() + "/");
  Gateway gw(provider, ProviderConfig{}, [](auto) {});
  EXPECT_EQ(gw.generate("hi there"), "hello back");
  const auto reqs = server.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].method, "POST");
  EXPECT_EQ(path_of(reqs[0].target), "/v1beta/models/gemini-1.5-pro-latest:generateContent");
  EXPECT_EQ(query_value(reqs[0].target, "key"), "k-123");
  const auto body = json::parse(reqs[0].body);
  EXPECT_EQ(body["contents"][0]["parts"][0]["text"], "hi there");
  EXPECT_EQ(body["contents"][0]["role"], "user");
}

TEST(GeminiProvider, RetriesRateLimitThenSucceeds) {
  int calls = 0;
  FakeServer server([&](const FakeRequest&) {
    if (++calls == 1) return FakeResponse{429, R"({"error":"slow"})", "application/json", {{"Retry-After", "2"}}};
    if (calls == 2) return FakeResponse{503, "{}"};
    return FakeResponse{200, candidate_reply("ok").dump()};
  });
  std::vector<std::chrono::milliseconds> sleeps;
  Gateway gw(std::make_shared<GeminiProvider>("k", server.base_url()), ProviderConfig{},
             [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  EXPECT_EQ(gw.generate("p"), "ok");
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[0], std::chrono::milliseconds(2000));
  EXPECT_EQ(gw.stats().retries, 2u);
}

TEST(GeminiProvider, ErrorMapping) {
  std::string mode;
  FakeServer server([&](const FakeRequest&) {
    if (mode == "auth") return FakeResponse{403, "{}"};
    if (mode == "blocked") return FakeResponse{200, R"({"promptFeedback":{"blockReason":"SAFETY"}})"};
    if (mode == "safety") return FakeResponse{200, R"({"candidates":[{"finishReason":"SAFETY"}]})"};
    return FakeResponse{400, "{}"};
  });
  Gateway gw(std::make_shared<GeminiProvider>("k", server.base_url()), ProviderConfig{}, [](auto) {});
  mode = "auth";
  EXPECT_ERRC(gw.generate("p"), Errc::AuthError);
  mode = "blocked";
  EXPECT_ERRC(gw.generate("p"), Errc::SafetyBlocked);
  mode = "safety";
  EXPECT_ERRC(gw.generate("p"), Errc::SafetyBlocked);
  mode = "bad";
  EXPECT_ERRC(gw.generate("p"), Errc::ProviderError);
  EXPECT_EQ(gw.stats().retries, 0u);
}

TEST(GeminiProvider, MissingKeyIsAuthError) {
  ::unsetenv("GEMINI_API_KEY");
  ::unsetenv("GOOGLE_API_KEY");
  GeminiProvider p("", "http://127.0.0.1:1");
  EXPECT_ERRC(p.generate("x", ProviderConfig{}), Errc::AuthError);
}

TEST(GeminiProvider, BatchEmbeddings) {
  FakeServer server([](const FakeRequest& r) {
    const auto body = json::parse(r.body);
    json out = {{"embeddings", json::array()}};
    for (std::size_t i = 0; i < body["requests"].size(); ++i) {
      out["embeddings"].push_back({{"values", {3.0 * static_cast<double>(i + 1), 4.0, 0.0}}});
    }
    return FakeResponse{200, out.dump()};
  });
  Gateway gw(std::make_shared<GeminiProvider>("k", server.base_url()), ProviderConfig{}, [](auto) {});
  const auto v = gw.embed({"a", "b"});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0][0], 0.6, 1e-12);
  EXPECT_EQ(path_of(server.requests()[0].target), "/v1beta/models/text-embedding-004:batchEmbedContents");
}

TEST(GeminiProvider, NetworkFailureIsRetryable) {
  std::string dead_url;
  {
    FakeServer s([](const FakeRequest&) { return FakeResponse{}; });
    dead_url = s.base_url();
  }
  ProviderConfig cfg;
  cfg.max_retries = 1;
  cfg.timeout = std::chrono::seconds(2);
  Gateway gw(std::make_shared<GeminiProvider>("k", dead_url), cfg, [](auto) {});
  EXPECT_ERRC(gw.generate("p"), Errc::ProviderError);
  EXPECT_EQ(gw.stats().attempts, 2u);
}

// ---- video platform -------------------------------------------------------------

namespace {

FakeResponse video_platform(const FakeRequest& r) {
  const auto path = path_of(r.target);
  if (path == "/search") {
    if (query_value(r.target, "pageToken").empty()) {
      return {200, R"({"items":[{"id":{"videoId":"v1"}},{"id":{"videoId":"v2"}}],"nextPageToken":"P2"})"};
    }
    return {200, R"({"items":[{"id":{"videoId":"v3"}},{"id":{"videoId":"v4"}},{"id":{"videoId":"v5"}}]})"};
  }
  if (path == "/videos") {
    json items = json::array();
    const auto wanted = query_value(r.target, "id");
    auto item = [&](const char* id, const char* when, const char* dur, const char* lang) {
      if (wanted.find(id) == std::string::npos) return;
      items.push_back({{"id", id},
                       {"snippet", {{"title", std::string("Talk ") + id}, {"channelTitle", "TED"},
                                    {"publishedAt", when}, {"defaultAudioLanguage", lang}}},
                       {"contentDetails", {{"duration", dur}}}});
    };
    item("v1", "2023-02-01T10:00:00Z", "PT10M", "en");
    item("v2", "2023-03-01T10:00:00Z", "PT12M30S", "en");
    item("v3", "2023-04-01T10:00:00Z", "PT2M", "en");
    item("v4", "2023-05-01T10:00:00Z", "PT9M", "en");
    item("v5", "2023-06-01T10:00:00Z", "PT9M", "fr");
    return {200, json{{"items", items}}.dump()};
  }
  if (path == "/api/timedtext") {
    const auto v = query_value(r.target, "v");
    const bool list = query_value(r.target, "type") == "list";
    if (v == "v2") return {403, ""};
    if (v == "v4") return {list ? 200 : 404, list ? R"(<transcript_list><track lang_code="en-GB"/></transcript_list>)" : "",
                           "text/xml"};
    if (v == "v5") return {200, R"(<transcript_list><track lang_code="fr"/></transcript_list>)", "text/xml"};
    if (list) return {200, R"(<transcript_list><track lang_code="de"/><track lang_code="en"/></transcript_list>)", "text/xml"};
    return {200, "<transcript><text start=\"0\">Water &amp;amp; sanitation</text><text start=\"2\"> for all &#39;now&#39; </text></transcript>",
            "text/xml"};
  }
  return {404, ""};
}

}  // namespace

TEST(YouTubeSource, PaginatesAndFiltersMetadata) {
  FakeServer server(video_platform);
  YouTubeConfig cfg;
  cfg.api_key = "yt";
  cfg.api_base = server.base_url();
  cfg.timedtext_base = server.base_url();
  YouTubeSource source(cfg);
  const auto records = source.fetch_metadata("UC123", CorpusWindow::preliminary(), 0);
  ASSERT_EQ(records.size(), 5u);
  EXPECT_EQ(records[2].skip_reason, SkipReason::BadDuration);
  EXPECT_EQ(records[1].duration, std::chrono::seconds(750));
  int searches = 0;
  for (const auto& r : server.requests()) searches += path_of(r.target) == "/search";
  EXPECT_EQ(searches, 2);
  EXPECT_EQ(query_value(server.requests()[0].target, "channelId"), "UC123");
}

TEST(YouTubeSource, TranscriptOutcomes) {
  FakeServer server(video_platform);
  YouTubeConfig cfg;
  cfg.api_key = "yt";
  cfg.api_base = server.base_url();
  cfg.timedtext_base = server.base_url();
  YouTubeSource source(cfg);
  const auto records = ingest(source, CorpusWindow::preliminary(), IngestOptions{"UC123", 0, 1});
  ASSERT_EQ(records.size(), 5u);
  EXPECT_TRUE(records[0].usable);
  EXPECT_EQ(records[0].transcript, "Water & sanitation for all 'now'");
  EXPECT_EQ(records[0].caption_language, "en");
  EXPECT_EQ(records[1].skip_reason, SkipReason::MemberOnly);
  EXPECT_EQ(records[2].skip_reason, SkipReason::BadDuration);
  EXPECT_EQ(records[3].skip_reason, SkipReason::NoTranscript);
  EXPECT_EQ(records[4].skip_reason, SkipReason::NonEnglish);
}

TEST(YouTubeSource, PageLimitAndAuth) {
  FakeServer server(video_platform);
  YouTubeConfig cfg;
  cfg.api_key = "yt";
  cfg.api_base = server.base_url();
  YouTubeSource source(cfg);
  EXPECT_EQ(source.fetch_metadata("UC123", CorpusWindow::preliminary(), 1).size(), 2u);
  ::unsetenv("YOUTUBE_API_KEY");
  YouTubeSource keyless(YouTubeConfig{});
  EXPECT_ERRC(keyless.fetch_metadata("UC123", CorpusWindow::preliminary(), 1), Errc::AuthError);
}
