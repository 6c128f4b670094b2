#include "goalforge/providers.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

#include "goalforge/documents.hpp"
#include "goalforge/util.hpp"
#include "http.hpp"

namespace goalforge {

using nlohmann::json;

Embedding hashed_embedding(std::string_view text, std::uint64_t salt, std::size_t dimension) {
  Embedding v(dimension, 0.0);
  auto words = tokenize_words(text);
  if (words.empty()) words.emplace_back(text);
  for (const auto& w : words) {
    const std::uint64_t h = mix64(fnv1a64(w) ^ salt);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dimension] += sign;
  }
  if (l2_norm(v) == 0.0) v[mix64(fnv1a64(text) ^ salt) % dimension] = 1.0;
  normalize(v);
  return v;
}

void ScriptedProvider::push_reply(std::string text) {
  std::lock_guard lock(mutex_);
  steps_.emplace_back(std::move(text));
}

void ScriptedProvider::push_error(Error error) {
  std::lock_guard lock(mutex_);
  steps_.emplace_back(std::move(error));
}

std::string ScriptedProvider::generate(const std::string& prompt, const ProviderConfig&) {
  std::lock_guard lock(mutex_);
  prompts_.push_back(prompt);
  if (steps_.empty()) throw Error(Errc::ProviderError, "scripted provider has no reply queued");
  auto step = std::move(steps_.front());
  steps_.pop_front();
  if (auto* e = std::get_if<Error>(&step)) throw *e;
  return std::get<std::string>(std::move(step));
}

std::vector<Embedding> ScriptedProvider::embed(const std::vector<std::string>& texts, const ProviderConfig& config) {
  std::vector<Embedding> out;
  for (const auto& t : texts) out.push_back(hashed_embedding(t, fnv1a64(config.embedding_model)));
  return out;
}

std::vector<std::string> ScriptedProvider::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mutex_);
  return steps_.size();
}

namespace {

std::string cassette_key(const std::string& model, const std::string& text) { return sha256_hex(model + "\n" + text); }

}  // namespace

Cassette Cassette::load(const std::filesystem::path& path) {
  Cassette c;
  if (!std::filesystem::exists(path)) return c;
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("version", 0) != 1) {
    throw Error(Errc::ParseError, "not a version-1 cassette: " + path.string());
  }
  for (const auto& [k, v] : j.at("replies").items()) c.replies_[k] = v.get<std::string>();
  for (const auto& [k, v] : j.at("embeddings").items()) c.embeddings_[k] = v.get<Embedding>();
  return c;
}

void Cassette::save(const std::filesystem::path& path) const {
  json j = {{"version", 1}, {"replies", replies_}, {"embeddings", embeddings_}};
  write_file(path, dump_json(j) + "\n");
}

std::optional<std::string> Cassette::reply(const std::string& model, const std::string& prompt) const {
  auto it = replies_.find(cassette_key(model, prompt));
  if (it == replies_.end()) return std::nullopt;
  return it->second;
}

std::optional<Embedding> Cassette::embedding(const std::string& model, const std::string& text) const {
  auto it = embeddings_.find(cassette_key(model, text));
  if (it == embeddings_.end()) return std::nullopt;
  return it->second;
}

void Cassette::put_reply(const std::string& model, const std::string& prompt, std::string reply) {
  replies_[cassette_key(model, prompt)] = std::move(reply);
}

void Cassette::put_embedding(const std::string& model, const std::string& text, Embedding vector) {
  embeddings_[cassette_key(model, text)] = std::move(vector);
}

std::string ReplayProvider::generate(const std::string& prompt, const ProviderConfig& config) {
  auto reply = cassette_.reply(config.generation_model, prompt);
  if (!reply) {
    throw Error(Errc::ProviderError, "no recorded reply for prompt " + sha256_hex(prompt).substr(0, 12));
  }
  return *reply;
}

std::vector<Embedding> ReplayProvider::embed(const std::vector<std::string>& texts, const ProviderConfig& config) {
  std::vector<Embedding> out;
  for (const auto& t : texts) {
    auto v = cassette_.embedding(config.embedding_model, t);
    if (!v) throw Error(Errc::ProviderError, "no recorded embedding for text " + sha256_hex(t).substr(0, 12));
    out.push_back(std::move(*v));
  }
  return out;
}

RecordingProvider::RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path path)
    : inner_(std::move(inner)), path_(std::move(path)), cassette_(Cassette::load(path_)) {}

std::string RecordingProvider::generate(const std::string& prompt, const ProviderConfig& config) {
  std::string reply = inner_->generate(prompt, config);
  std::lock_guard lock(mutex_);
  cassette_.put_reply(config.generation_model, prompt, reply);
  cassette_.save(path_);
  return reply;
}

std::vector<Embedding> RecordingProvider::embed(const std::vector<std::string>& texts, const ProviderConfig& config) {
  auto vectors = inner_->embed(texts, config);
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < texts.size() && i < vectors.size(); ++i) {
    cassette_.put_embedding(config.embedding_model, texts[i], vectors[i]);
  }
  cassette_.save(path_);
  return vectors;
}

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

json parse_body(const detail::HttpResponse& response, const std::string& what) {
  json j = json::parse(response.body, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ProviderError, what + " returned a non-JSON body");
  return j;
}

}  // namespace

GeminiProvider::GeminiProvider(std::string api_key, std::string base_url)
    : api_key_(std::move(api_key)), base_url_(std::move(base_url)) {
  if (api_key_.empty()) api_key_ = env_or_empty("GEMINI_API_KEY");
  if (api_key_.empty()) api_key_ = env_or_empty("GOOGLE_API_KEY");
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string GeminiProvider::generate(const std::string& prompt, const ProviderConfig& config) {
  if (api_key_.empty()) throw Error(Errc::AuthError, "no API key (set GEMINI_API_KEY)");
  const std::string url = base_url_ + "/v1beta/models/" + config.generation_model +
                          ":generateContent?key=" + detail::url_encode(api_key_);
  json body = {{"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", prompt}}})}}})}};
  const auto response = detail::http_post_json(url, body.dump(), config.timeout);
  if (response.status != 200) detail::throw_for_status(response, "generateContent");
  const json j = parse_body(response, "generateContent");

  if (j.contains("promptFeedback") && j["promptFeedback"].contains("blockReason")) {
    throw Error(Errc::SafetyBlocked, "prompt blocked: " + j["promptFeedback"]["blockReason"].dump());
  }
  if (!j.contains("candidates") || !j["candidates"].is_array() || j["candidates"].empty()) {
    throw Error(Errc::ProviderError, "generateContent returned no candidates").with_retryable(true);
  }
  const json& candidate = j["candidates"][0];
  if (candidate.value("finishReason", "") == "SAFETY") throw Error(Errc::SafetyBlocked, "reply blocked for safety");
  std::string text;
  if (candidate.contains("content") && candidate["content"].contains("parts")) {
    for (const auto& part : candidate["content"]["parts"]) text += part.value("text", "");
  }
  if (text.empty()) throw Error(Errc::ProviderError, "generateContent returned empty text").with_retryable(true);
  return text;
}

std::vector<Embedding> GeminiProvider::embed(const std::vector<std::string>& texts, const ProviderConfig& config) {
  if (api_key_.empty()) throw Error(Errc::AuthError, "no API key (set GEMINI_API_KEY)");
  const std::string model = "models/" + config.embedding_model;
  const std::string url =
      base_url_ + "/v1beta/" + model + ":batchEmbedContents?key=" + detail::url_encode(api_key_);
  json requests = json::array();
  for (const auto& t : texts) {
    requests.push_back({{"model", model}, {"content", {{"parts", json::array({{{"text", t}}})}}}});
  }
  const auto response = detail::http_post_json(url, json{{"requests", requests}}.dump(), config.timeout);
  if (response.status != 200) detail::throw_for_status(response, "batchEmbedContents");
  const json j = parse_body(response, "batchEmbedContents");
  std::vector<Embedding> out;
  if (!j.contains("embeddings")) throw Error(Errc::ProviderError, "batchEmbedContents returned no embeddings");
  for (const auto& e : j["embeddings"]) out.push_back(e.at("values").get<Embedding>());
  return out;
}

}  // namespace goalforge
