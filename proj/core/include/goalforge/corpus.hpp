#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "goalforge/util.hpp"

namespace goalforge {

enum class SkipReason { NoTranscript, MemberOnly, NonEnglish, OutOfWindow, BadDuration, AnnotationFailed, SafetyBlocked };

std::string_view to_string(SkipReason reason) noexcept;
std::optional<SkipReason> skip_reason_from_string(std::string_view text) noexcept;

inline constexpr std::chrono::seconds kMinDuration{240};
inline constexpr std::chrono::seconds kMaxDuration{1200};

struct TalkRecord {
  std::string video_id;
  std::string title;
  Timestamp published_at{};
  std::chrono::seconds duration{0};
  std::optional<std::string> transcript;
  std::string channel;
  std::string caption_language;  // empty when the video has no caption track
  bool member_only = false;
  bool usable = false;
  std::optional<SkipReason> skip_reason;

  bool operator==(const TalkRecord&) const = default;
};

// Closed date interval [start, end] (whole days, UTC) with a dataset label.
struct CorpusWindow {
  std::chrono::sys_days start{};
  std::chrono::sys_days end{};
  std::string label;

  static CorpusWindow preliminary();  // 2023-01-01 .. 2023-12-31
  static CorpusWindow formal();       // 2020-01-01 .. 2024-04-30
  // "YYYY-MM-DD..YYYY-MM-DD"; throws InvalidArgument unless start < end.
  static CorpusWindow parse(std::string_view range, std::string label);
  // Built-in window for "preliminary" / "formal"; nullopt otherwise.
  static std::optional<CorpusWindow> named(std::string_view label);

  bool contains(Timestamp t) const noexcept;
  std::string to_string() const;
};

bool duration_ok(std::chrono::seconds duration) noexcept;

// Acquires talk metadata and transcripts.
class TalkSource {
 public:
  virtual ~TalkSource() = default;
  // Records published inside `window`, transcripts not yet attached. Records
  // outside the duration bounds come back unusable with BadDuration.
  // page_limit caps result pages of 50 records (0 = no cap).
  virtual std::vector<TalkRecord> fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                                 int page_limit) = 0;
  // Attaches the transcript or sets a skip reason. Per-video availability
  // problems never throw; transport failures throw NetworkError.
  virtual TalkRecord fetch_transcript(const TalkRecord& record) = 0;
};

// Offline source over a directory holding <video_id>.json metadata and
// <video_id>.txt transcripts.
class FixtureSource : public TalkSource {
 public:
  explicit FixtureSource(std::filesystem::path dir);
  std::vector<TalkRecord> fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                         int page_limit) override;
  TalkRecord fetch_transcript(const TalkRecord& record) override;

  // Every metadata record in the directory, sorted by video_id.
  std::vector<TalkRecord> all_records() const;

 private:
  std::filesystem::path dir_;
};

// Writes a metadata document (and transcript, when present) in fixture layout.
void write_fixture(const std::filesystem::path& dir, const TalkRecord& record);
TalkRecord read_fixture_metadata(const std::filesystem::path& json_path);

// Live video-platform client: search + videos endpoints for metadata, the
// timed-text endpoint for English captions.
struct YouTubeConfig {
  std::string api_key;  // empty reads YOUTUBE_API_KEY
  std::string api_base = "https://www.googleapis.com/youtube/v3";
  std::string timedtext_base = "https://www.youtube.com";
  std::chrono::seconds timeout{30};
  double requests_per_second = 5.0;
};

class YouTubeSource : public TalkSource {
 public:
  explicit YouTubeSource(YouTubeConfig config);
  ~YouTubeSource() override;
  // `channel` is a channel id.
  std::vector<TalkRecord> fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                         int page_limit) override;
  TalkRecord fetch_transcript(const TalkRecord& record) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Wraps a source and mirrors everything it returns into a fixture directory,
// which a FixtureSource can later replay.
class RecordingSource : public TalkSource {
 public:
  RecordingSource(std::shared_ptr<TalkSource> inner, std::filesystem::path dir);
  std::vector<TalkRecord> fetch_metadata(const std::string& channel, const CorpusWindow& window,
                                         int page_limit) override;
  TalkRecord fetch_transcript(const TalkRecord& record) override;

 private:
  std::shared_ptr<TalkSource> inner_;
  std::filesystem::path dir_;
  std::mutex mutex_;
};

struct IngestOptions {
  std::string channel = "TED";
  int page_limit = 0;
  unsigned workers = 4;
};

// fetch_metadata then fetch_transcript for every record not already skipped.
// Records come back sorted by video_id regardless of fetch order.
std::vector<TalkRecord> ingest(TalkSource& source, const CorpusWindow& window, const IngestOptions& options = {});

struct CorpusSummary {
  std::size_t collected = 0;
  std::size_t usable = 0;
  std::map<SkipReason, std::size_t> skipped_by_reason;
  bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary summarize(const std::vector<TalkRecord>& records);

}  // namespace goalforge
