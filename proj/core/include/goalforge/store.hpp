#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "goalforge/annotate.hpp"
#include "goalforge/corpus.hpp"
#include "goalforge/kg.hpp"
#include "goalforge/roundtable.hpp"
#include "goalforge/synthesis.hpp"

struct sqlite3;

namespace goalforge {

inline constexpr int kStoreSchemaVersion = 1;

// "preliminary" -> "", "formal" -> "2", custom label -> "_label". Custom
// labels are lower-case [a-z0-9_]; InvalidArgument otherwise.
std::string table_suffix(const std::string& dataset);

enum class Origin { Generated, Imported };
std::string_view to_string(Origin origin) noexcept;

struct StoredAnnotation {
  TalkAnnotation annotation;
  Origin origin = Origin::Generated;
  RunMetadata metadata;
  bool operator==(const StoredAnnotation&) const = default;
};

enum class TranscriptStatus { Ok, Failed, Imported };
std::string_view to_string(TranscriptStatus status) noexcept;

struct StoredTranscript {
  RoundtableTranscript transcript;
  TranscriptStatus status = TranscriptStatus::Ok;
  std::string error;
  bool operator==(const StoredTranscript&) const = default;
};

struct DatasetCounts {
  std::size_t talks = 0;
  std::size_t usable_talks = 0;
  std::size_t annotations = 0;
  std::size_t transcripts = 0;  // status ok or imported
  std::size_t failed_transcripts = 0;
  std::size_t graphs = 0;
  std::size_t proposals = 0;
  bool operator==(const DatasetCounts&) const = default;
};

// Read operations shared by the live store and snapshots.
class StoreReader {
 public:
  virtual ~StoreReader() = default;
  std::vector<std::string> datasets() const;
  bool has_dataset(const std::string& dataset) const;
  std::vector<TalkRecord> talks(const std::string& dataset) const;
  std::vector<StoredAnnotation> annotations(const std::string& dataset) const;
  std::vector<TalkAnnotation> talk_annotations(const std::string& dataset) const;
  std::vector<StoredTranscript> transcripts(const std::string& dataset) const;
  std::optional<StoredTranscript> transcript(const std::string& dataset, int goal) const;
  std::vector<KnowledgeGraph> graphs(const std::string& dataset) const;
  std::vector<NewGoalProposal> proposals(const std::string& dataset) const;
  DatasetCounts counts(const std::string& dataset) const;

 protected:
  virtual sqlite3* reader() const = 0;
  virtual std::unique_lock<std::mutex> lock() const = 0;
};

// Point-in-time view: a dedicated connection holding an open read transaction.
// Use from one thread at a time.
class Snapshot : public StoreReader {
 public:
  ~Snapshot() override;
  Snapshot(Snapshot&&) noexcept;
  Snapshot& operator=(Snapshot&&) = delete;

 protected:
  sqlite3* reader() const override { return db_; }
  std::unique_lock<std::mutex> lock() const override { return std::unique_lock<std::mutex>(*mutex_); }

 private:
  friend class Store;
  explicit Snapshot(sqlite3* db);
  sqlite3* db_ = nullptr;
  std::unique_ptr<std::mutex> mutex_;
};

// Single-file SQLite store. One writer at a time (internally serialized);
// readers use snapshots. Write operations enforce referential integrity:
// annotations need a talk row, graphs need a transcript, proposals need graphs
// for their source goals.
class Store : public StoreReader {
 public:
  // Creates or migrates the file. IncompatibleVersion for a newer schema.
  static Store open(const std::filesystem::path& path);
  ~Store() override;
  Store(Store&&) noexcept;
  Store& operator=(Store&&) noexcept;

  int schema_version() const;
  const std::filesystem::path& path() const noexcept { return path_; }

  // Registers a dataset label and creates its tables. Idempotent.
  void ensure_dataset(const std::string& dataset);

  void put_talks(const std::string& dataset, const std::vector<TalkRecord>& talks, Origin origin = Origin::Generated);
  void put_annotation(const std::string& dataset, const TalkAnnotation& annotation, Origin origin = Origin::Generated,
                      const RunMetadata& metadata = {});
  void put_annotations(const std::string& dataset, const std::vector<TalkAnnotation>& annotations,
                       Origin origin = Origin::Generated);
  // Marks a talk unusable after annotation gave up on it.
  void mark_skipped(const std::string& dataset, const std::string& video_id, SkipReason reason);
  void put_transcript(const RoundtableTranscript& transcript, TranscriptStatus status = TranscriptStatus::Ok);
  void put_transcript_failure(const std::string& dataset, int goal, const std::string& error);
  void put_graph(const KnowledgeGraph& graph);
  void put_proposals(const std::string& dataset, const std::vector<NewGoalProposal>& proposals,
                     const RunMetadata& metadata = {});

  // Removes every artifact of a stage onwards, so a stage can be re-run cleanly.
  enum class Stage { Talks, Annotations, Transcripts, Graphs, Proposals };
  void clear_from(const std::string& dataset, Stage stage);

  Snapshot snapshot() const;

 protected:
  sqlite3* reader() const override { return db_; }
  std::unique_lock<std::mutex> lock() const override { return std::unique_lock<std::mutex>(*mutex_); }

 private:
  Store() = default;
  sqlite3* db_ = nullptr;
  std::filesystem::path path_;
  std::unique_ptr<std::mutex> mutex_;
};

}  // namespace goalforge
