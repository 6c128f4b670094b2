#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "goalforge/annotate.hpp"
#include "goalforge/catalog.hpp"
#include "goalforge/llm.hpp"

namespace goalforge {

// Text embedded for a talk: title, description, core value and key words.
std::string annotation_embedding_text(const TalkAnnotation& annotation);

// One unit vector per talk, ordered by video_id.
class EmbeddingIndex {
 public:
  struct Entry {
    std::string video_id;
    Embedding vector;
    bool operator==(const Entry&) const = default;
  };

  EmbeddingIndex() = default;
  EmbeddingIndex(std::string model_id, std::optional<std::uint64_t> seed);

  // Throws InvalidArgument on a dimension mismatch, a non-unit vector or a
  // duplicate id.
  void add(std::string video_id, Embedding vector);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Embedding* find(const std::string& video_id) const;
  const std::string& model_id() const noexcept { return model_id_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  // Little-endian float64 vector file plus a JSON manifest (<path>.json)
  // recording dimension, model id, seed and the id order.
  void save(const std::filesystem::path& path) const;
  static EmbeddingIndex load(const std::filesystem::path& path);

  bool operator==(const EmbeddingIndex&) const = default;

 private:
  std::vector<Entry> entries_;
  std::size_t dimension_ = 0;
  std::string model_id_;
  std::optional<std::uint64_t> seed_;
};

struct IndexBuild {
  EmbeddingIndex index;
  std::vector<std::pair<std::string, std::string>> skipped;  // (video_id, error)
};

// Embeds every annotation. Provider failures skip the talk and are logged in
// `skipped`. Throws EmptyDataset for no annotations.
IndexBuild build_index(const std::vector<TalkAnnotation>& annotations, Gateway& gateway, std::size_t batch_size = 32);

struct ParticipantSet {
  int goal = 0;
  std::vector<std::string> members;
  std::vector<double> scores;
  bool operator==(const ParticipantSet&) const = default;
};

inline constexpr std::size_t kDefaultParticipantCap = 25;

// Talks tagged with `goal`, ranked by cosine similarity of their vector to the
// embedded goal profile, ties by video_id ascending, truncated to `cap`.
// Throws NoCandidates when no indexed talk carries the tag.
ParticipantSet select_participants(int goal, const EmbeddingIndex& index,
                                   const std::map<std::string, std::set<int>>& tags, const Catalog& catalog,
                                   Gateway& gateway, std::size_t cap = kDefaultParticipantCap);

// Ranking core with a precomputed profile vector.
ParticipantSet rank_participants(int goal, const Embedding& profile, const EmbeddingIndex& index,
                                 const std::map<std::string, std::set<int>>& tags, std::size_t cap);

}  // namespace goalforge
