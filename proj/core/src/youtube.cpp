#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sstream>

#include "goalforge/corpus.hpp"
#include "goalforge/error.hpp"
#include "goalforge/llm.hpp"
#include "http.hpp"

namespace goalforge {

using nlohmann::json;

namespace {

namespace pt = boost::property_tree;

// Caption XML double-escapes some entities ("&amp;#39;" arrives as "&#39;").
std::string decode_entities(const std::string& text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '&') {
      const auto semi = text.find(';', i);
      if (semi != std::string::npos && semi - i <= 8) {
        const std::string entity = text.substr(i + 1, semi - i - 1);
        std::string repl;
        if (entity == "amp") repl = "&";
        else if (entity == "lt") repl = "<";
        else if (entity == "gt") repl = ">";
        else if (entity == "quot") repl = "\"";
        else if (entity == "apos") repl = "'";
        else if (entity.size() > 1 && entity[0] == '#') {
          const long code = entity[1] == 'x' ? std::strtol(entity.c_str() + 2, nullptr, 16)
                                             : std::strtol(entity.c_str() + 1, nullptr, 10);
          if (code > 0 && code < 128) repl = std::string(1, static_cast<char>(code));
        }
        if (!repl.empty()) {
          out += repl;
          i = semi;
          continue;
        }
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

pt::ptree parse_xml(const std::string& body) {
  std::istringstream in(body);
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::ParseError, std::string("caption XML: ") + e.what());
  }
  return tree;
}

void check_api_status(const detail::HttpResponse& response, const std::string& what) {
  if (response.status == 200) return;
  const json j = json::parse(response.body, nullptr, false);
  std::string reason;
  if (!j.is_discarded() && j.contains("error") && j["error"].contains("errors") && !j["error"]["errors"].empty()) {
    reason = j["error"]["errors"][0].value("reason", "");
  }
  if (reason == "quotaExceeded" || reason == "dailyLimitExceeded" || reason == "rateLimitExceeded") {
    Error e(Errc::QuotaExceeded, what + ": " + reason);
    e.with_retryable(true);
    const std::string after = response.header("retry-after");
    if (!after.empty()) e.with_retry_after(std::chrono::seconds{std::atol(after.c_str())});
    throw e;
  }
  if (response.status == 400 && reason == "keyInvalid") throw Error(Errc::AuthError, what + ": invalid API key");
  detail::throw_for_status(response, what);
}

}  // namespace

struct YouTubeSource::Impl {
  YouTubeConfig config;
  RateLimiter limiter;

  explicit Impl(YouTubeConfig c) : config(std::move(c)), limiter(config.requests_per_second) {}

  detail::HttpResponse get(const std::string& url) {
    limiter.acquire();
    return detail::http_get(url, config.timeout);
  }

  json get_json(const std::string& url, const std::string& what) {
    const auto response = get(url);
    check_api_status(response, what);
    json j = json::parse(response.body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::ParseError, what + " returned a non-JSON body");
    return j;
  }
};

YouTubeSource::YouTubeSource(YouTubeConfig config) {
  if (config.api_key.empty()) {
    if (const char* k = std::getenv("YOUTUBE_API_KEY")) config.api_key = k;
  }
  impl_ = std::make_unique<Impl>(std::move(config));
}

YouTubeSource::~YouTubeSource() = default;

std::vector<TalkRecord> YouTubeSource::fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                                      int page_limit) {
  const auto& cfg = impl_->config;
  if (cfg.api_key.empty()) throw Error(Errc::AuthError, "no API key (set YOUTUBE_API_KEY)");
  const std::string key = detail::url_encode(cfg.api_key);

  std::vector<std::string> ids;
  std::string page_token;
  for (int page = 0; page_limit <= 0 || page < page_limit; ++page) {
    std::string url = cfg.api_base + "/search?part=id&type=video&videoDuration=medium&order=date&maxResults=50" +
                      "&channelId=" + detail::url_encode(channel) +
                      "&publishedAfter=" + detail::url_encode(format_date(window.start) + "T00:00:00Z") +
                      "&publishedBefore=" +
                      detail::url_encode(format_date(window.end + std::chrono::days{1}) + "T00:00:00Z") +
                      "&key=" + key;
    if (!page_token.empty()) url += "&pageToken=" + detail::url_encode(page_token);
    const json j = impl_->get_json(url, "search.list");
    for (const auto& item : j.value("items", json::array())) {
      if (item.contains("id") && item["id"].contains("videoId")) ids.push_back(item["id"]["videoId"].get<std::string>());
    }
    page_token = j.value("nextPageToken", "");
    if (page_token.empty()) break;
  }

  std::vector<TalkRecord> records;
  for (std::size_t begin = 0; begin < ids.size(); begin += 50) {
    std::string joined;
    for (std::size_t i = begin; i < ids.size() && i < begin + 50; ++i) joined += (i > begin ? "," : "") + ids[i];
    const json j = impl_->get_json(
        cfg.api_base + "/videos?part=snippet,contentDetails&id=" + detail::url_encode(joined) + "&key=" + key,
        "videos.list");
    for (const auto& item : j.value("items", json::array())) {
      TalkRecord r;
      r.video_id = item.value("id", "");
      const json snippet = item.value("snippet", json::object());
      const json details = item.value("contentDetails", json::object());
      r.title = snippet.value("title", "");
      r.channel = snippet.value("channelTitle", "");
      r.published_at = parse_iso8601(snippet.value("publishedAt", "1970-01-01T00:00:00Z"));
      r.duration = parse_iso8601_duration(details.value("duration", "PT0S"));
      r.caption_language = snippet.value("defaultAudioLanguage", snippet.value("defaultLanguage", ""));
      if (!window.contains(r.published_at)) continue;
      if (!duration_ok(r.duration)) r.skip_reason = SkipReason::BadDuration;
      records.push_back(std::move(r));
    }
  }
  return records;
}

TalkRecord YouTubeSource::fetch_transcript(const TalkRecord& record) {
  TalkRecord r = record;
  if (r.skip_reason) return r;
  auto skip = [&](SkipReason reason) {
    r.usable = false;
    r.transcript.reset();
    r.skip_reason = reason;
    return r;
  };
  const auto& cfg = impl_->config;
  const std::string vid = detail::url_encode(r.video_id);
  const auto list = impl_->get(cfg.timedtext_base + "/api/timedtext?type=list&v=" + vid);
  if (list.status == 403) {
    r.member_only = true;
    return skip(SkipReason::MemberOnly);
  }
  if (list.status == 404) return skip(SkipReason::NoTranscript);
  if (list.status != 200) detail::throw_for_status(list, "timedtext list");
  if (trim(list.body).empty()) return skip(SkipReason::NoTranscript);

  std::vector<std::string> languages;
  const pt::ptree listing = parse_xml(list.body);
  const pt::ptree no_tracks;
  for (const auto& [name, node] : listing.get_child("transcript_list", no_tracks)) {
    if (name == "track") languages.push_back(node.get<std::string>("<xmlattr>.lang_code", ""));
  }
  if (languages.empty()) return skip(SkipReason::NoTranscript);
  std::string chosen;
  for (const auto& lang : languages) {
    if (starts_with_ci(lang, "en")) {
      chosen = lang;
      break;
    }
  }
  if (chosen.empty()) {
    r.caption_language = languages.front();
    return skip(SkipReason::NonEnglish);
  }
  r.caption_language = chosen;

  const auto track = impl_->get(cfg.timedtext_base + "/api/timedtext?lang=" + detail::url_encode(chosen) + "&v=" + vid);
  if (track.status == 403) {
    r.member_only = true;
    return skip(SkipReason::MemberOnly);
  }
  if (track.status == 404) return skip(SkipReason::NoTranscript);
  if (track.status != 200) detail::throw_for_status(track, "timedtext fetch");
  std::vector<std::string> lines;
  const pt::ptree captions = parse_xml(track.body);
  const pt::ptree no_lines;
  for (const auto& [name, node] : captions.get_child("transcript", no_lines)) {
    if (name != "text") continue;
    std::string line = trim(decode_entities(node.get_value<std::string>()));
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) return skip(SkipReason::NoTranscript);
  r.transcript = join(lines, " ");
  r.usable = true;
  return r;
}

}  // namespace goalforge
