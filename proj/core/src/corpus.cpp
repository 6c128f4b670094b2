#include "goalforge/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "goalforge/documents.hpp"
#include "goalforge/error.hpp"

namespace goalforge {

using nlohmann::json;

std::string_view to_string(SkipReason reason) noexcept {
  switch (reason) {
    case SkipReason::NoTranscript: return "NoTranscript";
    case SkipReason::MemberOnly: return "MemberOnly";
    case SkipReason::NonEnglish: return "NonEnglish";
    case SkipReason::OutOfWindow: return "OutOfWindow";
    case SkipReason::BadDuration: return "BadDuration";
    case SkipReason::AnnotationFailed: return "AnnotationFailed";
    case SkipReason::SafetyBlocked: return "SafetyBlocked";
  }
  return "Unknown";
}

std::optional<SkipReason> skip_reason_from_string(std::string_view text) noexcept {
  for (auto r : {SkipReason::NoTranscript, SkipReason::MemberOnly, SkipReason::NonEnglish, SkipReason::OutOfWindow,
                 SkipReason::BadDuration, SkipReason::AnnotationFailed, SkipReason::SafetyBlocked}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

CorpusWindow CorpusWindow::preliminary() { return parse("2023-01-01..2023-12-31", "preliminary"); }
CorpusWindow CorpusWindow::formal() { return parse("2020-01-01..2024-04-30", "formal"); }

CorpusWindow CorpusWindow::parse(std::string_view range, std::string label) {
  const auto dots = range.find("..");
  if (dots == std::string_view::npos) {
    throw Error(Errc::InvalidArgument, "window must look like YYYY-MM-DD..YYYY-MM-DD, got '" + std::string(range) + "'");
  }
  CorpusWindow w{parse_date(range.substr(0, dots)), parse_date(range.substr(dots + 2)), std::move(label)};
  if (!(w.start < w.end)) throw Error(Errc::InvalidArgument, "window start must precede its end");
  return w;
}

std::optional<CorpusWindow> CorpusWindow::named(std::string_view label) {
  if (label == "preliminary") return preliminary();
  if (label == "formal") return formal();
  return std::nullopt;
}

bool CorpusWindow::contains(Timestamp t) const noexcept {
  return t >= Timestamp{start} && t < Timestamp{end + std::chrono::days{1}};
}

std::string CorpusWindow::to_string() const { return format_date(start) + ".." + format_date(end); }

bool duration_ok(std::chrono::seconds duration) noexcept {
  return duration >= kMinDuration && duration <= kMaxDuration;
}

TalkRecord read_fixture_metadata(const std::filesystem::path& json_path) {
  const json j = json::parse(read_file(json_path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::ParseError, "not a JSON object: " + json_path.string());
  TalkRecord r;
  try {
    r.video_id = j.at("video_id").get<std::string>();
    r.title = j.at("title").get<std::string>();
    r.published_at = parse_iso8601(j.at("published_at").get<std::string>());
    r.duration = std::chrono::seconds{j.at("duration_seconds").get<long long>()};
    r.channel = j.value("channel", std::string());
    if (j.contains("caption_language") && j["caption_language"].is_string()) {
      r.caption_language = j["caption_language"].get<std::string>();
    }
    r.member_only = j.value("member_only", false);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, json_path.string() + ": " + e.what()).with_path(json_path.string());
  }
  if (r.video_id.empty()) throw Error(Errc::ParseError, json_path.string() + ": empty video_id");
  return r;
}

void write_fixture(const std::filesystem::path& dir, const TalkRecord& record) {
  json j = {{"video_id", record.video_id},
            {"title", record.title},
            {"published_at", format_iso8601(record.published_at)},
            {"duration_seconds", record.duration.count()},
            {"channel", record.channel},
            {"caption_language", record.caption_language.empty() ? json(nullptr) : json(record.caption_language)},
            {"member_only", record.member_only}};
  write_file(dir / (record.video_id + ".json"), dump_json(j) + "\n");
  if (record.transcript) write_file(dir / (record.video_id + ".txt"), *record.transcript);
}

FixtureSource::FixtureSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw Error(Errc::IoError, "fixture directory not found: " + dir_.string());
}

std::vector<TalkRecord> FixtureSource::all_records() const {
  std::vector<TalkRecord> records;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      records.push_back(read_fixture_metadata(entry.path()));
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  return records;
}

std::vector<TalkRecord> FixtureSource::fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                                      int page_limit) {
  std::vector<TalkRecord> out;
  for (auto& r : all_records()) {
    if (!channel.empty() && r.channel != channel) continue;
    if (!window.contains(r.published_at)) continue;
    if (!duration_ok(r.duration)) {
      r.usable = false;
      r.skip_reason = SkipReason::BadDuration;
    }
    out.push_back(std::move(r));
  }
  if (page_limit > 0 && out.size() > static_cast<std::size_t>(page_limit) * 50) {
    out.resize(static_cast<std::size_t>(page_limit) * 50);
  }
  return out;
}

TalkRecord FixtureSource::fetch_transcript(const TalkRecord& record) {
  TalkRecord r = record;
  if (r.skip_reason) return r;
  auto skip = [&](SkipReason reason) {
    r.usable = false;
    r.transcript.reset();
    r.skip_reason = reason;
    return r;
  };
  if (r.member_only) return skip(SkipReason::MemberOnly);
  if (r.caption_language.empty()) return skip(SkipReason::NoTranscript);
  if (!starts_with_ci(r.caption_language, "en")) return skip(SkipReason::NonEnglish);
  const auto path = dir_ / (r.video_id + ".txt");
  if (!std::filesystem::exists(path)) return skip(SkipReason::NoTranscript);
  std::string text = read_file(path);
  if (trim(text).empty()) return skip(SkipReason::NoTranscript);
  r.transcript = std::move(text);
  r.usable = true;
  r.skip_reason.reset();
  return r;
}

RecordingSource::RecordingSource(std::shared_ptr<TalkSource> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

std::vector<TalkRecord> RecordingSource::fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                                        int page_limit) {
  auto records = inner_->fetch_metadata(channel, window, page_limit);
  std::lock_guard lock(mutex_);
  for (const auto& r : records) write_fixture(dir_, r);
  return records;
}

TalkRecord RecordingSource::fetch_transcript(const TalkRecord& record) {
  TalkRecord r = inner_->fetch_transcript(record);
  std::lock_guard lock(mutex_);
  TalkRecord stored = r;
  // Replay must reach the same verdict: availability problems are encoded in
  // the metadata rather than by omitting the transcript file alone.
  if (r.skip_reason == SkipReason::MemberOnly) stored.member_only = true;
  if (r.skip_reason == SkipReason::NoTranscript) stored.caption_language.clear();
  write_fixture(dir_, stored);
  return r;
}

std::vector<TalkRecord> ingest(TalkSource& source, const CorpusWindow& window, const IngestOptions& options) {
  auto records = source.fetch_metadata(options.channel, window, options.page_limit);
  std::vector<TalkRecord> out(records.size());
  parallel_for(records.size(), options.workers, [&](std::size_t i) {
    out[i] = records[i].skip_reason ? records[i] : source.fetch_transcript(records[i]);
  });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  return out;
}

CorpusSummary summarize(const std::vector<TalkRecord>& records) {
  CorpusSummary s;
  s.collected = records.size();
  for (const auto& r : records) {
    if (r.usable) {
      ++s.usable;
    } else if (r.skip_reason) {
      ++s.skipped_by_reason[*r.skip_reason];
    }
  }
  return s;
}

}  // namespace goalforge
