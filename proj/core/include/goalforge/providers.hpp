#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "goalforge/error.hpp"
#include "goalforge/llm.hpp"

namespace goalforge {

// Feature-hashed bag-of-words embedding: deterministic in (text, salt),
// unit length. Shared by the offline providers.
Embedding hashed_embedding(std::string_view text, std::uint64_t salt, std::size_t dimension = 256);

// Replies from a queue, for fault-injection tests. Each generate() pops one
// step: a reply text or an error to throw. Embeddings are hashed.
class ScriptedProvider : public Provider {
 public:
  void push_reply(std::string text);
  void push_error(Error error);

  std::string id() const override { return "scripted"; }
  std::string generate(const std::string& prompt, const ProviderConfig& config) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts, const ProviderConfig& config) override;

  std::vector<std::string> prompts() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::variant<std::string, Error>> steps_;
  std::vector<std::string> prompts_;
};

// Record/replay cassette: a JSON file mapping sha256(model + prompt) to the
// reply, and sha256(model + text) to the embedding.
class Cassette {
 public:
  static Cassette load(const std::filesystem::path& path);  // missing file = empty cassette
  void save(const std::filesystem::path& path) const;

  std::optional<std::string> reply(const std::string& model, const std::string& prompt) const;
  std::optional<Embedding> embedding(const std::string& model, const std::string& text) const;
  void put_reply(const std::string& model, const std::string& prompt, std::string reply);
  void put_embedding(const std::string& model, const std::string& text, Embedding vector);
  std::size_t size() const { return replies_.size() + embeddings_.size(); }

 private:
  std::map<std::string, std::string> replies_;
  std::map<std::string, Embedding> embeddings_;
};

// Serves from a cassette only; a miss is a non-retryable ProviderError.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(Cassette cassette) : cassette_(std::move(cassette)) {}
  std::string id() const override { return "replay"; }
  std::string generate(const std::string& prompt, const ProviderConfig& config) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts, const ProviderConfig& config) override;

 private:
  Cassette cassette_;
};

// Forwards to `inner` and appends every exchange to the cassette file.
class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path path);
  std::string id() const override { return inner_->id(); }
  std::string generate(const std::string& prompt, const ProviderConfig& config) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts, const ProviderConfig& config) override;

 private:
  std::shared_ptr<Provider> inner_;
  std::filesystem::path path_;
  std::mutex mutex_;
  Cassette cassette_;
};

// Google Generative Language REST API (generateContent / batchEmbedContents).
class GeminiProvider : public Provider {
 public:
  // Empty api_key reads GEMINI_API_KEY, then GOOGLE_API_KEY.
  explicit GeminiProvider(std::string api_key = {},
                          std::string base_url = "https://generativelanguage.googleapis.com");
  std::string id() const override { return "gemini"; }
  std::string generate(const std::string& prompt, const ProviderConfig& config) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts, const ProviderConfig& config) override;

 private:
  std::string api_key_;
  std::string base_url_;
};

}  // namespace goalforge
