#include "goalforge/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "goalforge/documents.hpp"
#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

using nlohmann::json;

std::string annotation_embedding_text(const TalkAnnotation& a) {
  return a.title + "\n" + a.description + "\n" + a.core_value + "\n" + join(a.key_words, ", ");
}

EmbeddingIndex::EmbeddingIndex(std::string model_id, std::optional<std::uint64_t> seed)
    : model_id_(std::move(model_id)), seed_(seed) {}

void EmbeddingIndex::add(std::string video_id, Embedding vector) {
  if (vector.empty()) throw Error(Errc::InvalidArgument, "empty vector for " + video_id);
  if (dimension_ == 0) dimension_ = vector.size();
  if (vector.size() != dimension_) {
    throw Error(Errc::InvalidArgument, "vector for " + video_id + " has dimension " + std::to_string(vector.size()) +
                                           ", index has " + std::to_string(dimension_));
  }
  if (std::abs(l2_norm(vector) - 1.0) > 1e-9) throw Error(Errc::InvalidArgument, "vector for " + video_id + " is not unit length");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), video_id,
                             [](const Entry& e, const std::string& id) { return e.video_id < id; });
  if (it != entries_.end() && it->video_id == video_id) throw Error(Errc::InvalidArgument, "duplicate id " + video_id);
  entries_.insert(it, {std::move(video_id), std::move(vector)});
}

const Embedding* EmbeddingIndex::find(const std::string& video_id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), video_id,
                             [](const Entry& e, const std::string& id) { return e.video_id < id; });
  return it != entries_.end() && it->video_id == video_id ? &it->vector : nullptr;
}

namespace {

static_assert(std::endian::native == std::endian::little, "vector files are written little-endian");

std::filesystem::path manifest_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

void EmbeddingIndex::save(const std::filesystem::path& path) const {
  std::string blob;
  blob.reserve(entries_.size() * dimension_ * sizeof(double));
  json ids = json::array();
  for (const auto& e : entries_) {
    ids.push_back(e.video_id);
    blob.append(reinterpret_cast<const char*>(e.vector.data()), e.vector.size() * sizeof(double));
  }
  json manifest = {{"format", "goalforge-index"},
                   {"version", 1},
                   {"dimension", dimension_},
                   {"count", entries_.size()},
                   {"model", model_id_},
                   {"seed", seed_ ? json(*seed_) : json(nullptr)},
                   {"sha256", sha256_hex(blob)},
                   {"ids", ids}};
  write_file(path, blob);
  write_file(manifest_path(path), dump_json(manifest) + "\n");
}

EmbeddingIndex EmbeddingIndex::load(const std::filesystem::path& path) {
  const json manifest = json::parse(read_file(manifest_path(path)), nullptr, false);
  if (manifest.is_discarded() || manifest.value("format", "") != "goalforge-index") {
    throw Error(Errc::ParseError, "not an index manifest: " + manifest_path(path).string());
  }
  if (manifest.value("version", 0) != 1) throw Error(Errc::IncompatibleVersion, "unsupported index version");
  const std::string blob = read_file(path);
  if (sha256_hex(blob) != manifest.value("sha256", "")) {
    throw Error(Errc::IntegrityViolation, "index vectors do not match their manifest checksum");
  }
  const auto dimension = manifest.at("dimension").get<std::size_t>();
  const auto ids = manifest.at("ids").get<std::vector<std::string>>();
  if (blob.size() != ids.size() * dimension * sizeof(double)) {
    throw Error(Errc::IntegrityViolation, "index file size does not match manifest");
  }
  std::optional<std::uint64_t> seed;
  if (manifest.contains("seed") && !manifest["seed"].is_null()) seed = manifest["seed"].get<std::uint64_t>();
  EmbeddingIndex index(manifest.value("model", ""), seed);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Embedding v(dimension);
    std::memcpy(v.data(), blob.data() + i * dimension * sizeof(double), dimension * sizeof(double));
    index.add(ids[i], std::move(v));
  }
  index.dimension_ = dimension;
  return index;
}

IndexBuild build_index(const std::vector<TalkAnnotation>& annotations, Gateway& gateway, std::size_t batch_size) {
  if (annotations.empty()) throw Error(Errc::EmptyDataset, "no annotations to index");
  IndexBuild out{EmbeddingIndex(gateway.config().embedding_model, gateway.config().seed), {}};
  batch_size = std::max<std::size_t>(1, batch_size);
  for (std::size_t begin = 0; begin < annotations.size(); begin += batch_size) {
    const std::size_t end = std::min(annotations.size(), begin + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = begin; i < end; ++i) texts.push_back(annotation_embedding_text(annotations[i]));
    try {
      auto vectors = gateway.embed(texts);
      for (std::size_t i = begin; i < end; ++i) out.index.add(annotations[i].video_id, std::move(vectors[i - begin]));
    } catch (const Error&) {
      // Retry one by one so a single bad talk does not sink the batch.
      for (std::size_t i = begin; i < end; ++i) {
        if (out.index.find(annotations[i].video_id)) continue;
        try {
          auto v = gateway.embed({texts[i - begin]});
          out.index.add(annotations[i].video_id, std::move(v.front()));
        } catch (const Error& e) {
          out.skipped.emplace_back(annotations[i].video_id, e.what());
        }
      }
    }
  }
  if (out.index.empty()) throw Error(Errc::EmptyDataset, "every talk failed to embed");
  return out;
}

ParticipantSet rank_participants(int goal, const Embedding& profile, const EmbeddingIndex& index,
                                 const std::map<std::string, std::set<int>>& tags, std::size_t cap) {
  std::vector<std::pair<double, const std::string*>> scored;
  for (const auto& e : index.entries()) {
    auto it = tags.find(e.video_id);
    if (it == tags.end() || !it->second.contains(goal)) continue;
    scored.emplace_back(cosine(e.vector, profile), &e.video_id);
  }
  if (scored.empty()) {
    throw Error(Errc::NoCandidates, "no indexed talk is tagged with goal " + std::to_string(goal))
        .with_path(std::to_string(goal));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : *a.second < *b.second;
  });
  if (scored.size() > cap) scored.resize(cap);
  ParticipantSet set{goal, {}, {}};
  for (const auto& [score, id] : scored) {
    set.members.push_back(*id);
    set.scores.push_back(score);
  }
  return set;
}

ParticipantSet select_participants(int goal, const EmbeddingIndex& index,
                                   const std::map<std::string, std::set<int>>& tags, const Catalog& catalog,
                                   Gateway& gateway, std::size_t cap) {
  if (!catalog.contains(goal)) throw Error(Errc::InvalidArgument, "goal " + std::to_string(goal) + " out of range");
  if (cap == 0) throw Error(Errc::InvalidArgument, "participant cap must be positive");
  const auto profile = gateway.embed({catalog.profile_text(goal)});
  return rank_participants(goal, profile.front(), index, tags, cap);
}

}  // namespace goalforge
