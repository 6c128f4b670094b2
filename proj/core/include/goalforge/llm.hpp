#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace goalforge {

using Embedding = std::vector<double>;

struct ProviderConfig {
  std::string generation_model = "gemini-1.5-pro-latest";
  std::string embedding_model = "text-embedding-004";
  int max_retries = 3;
  std::chrono::seconds timeout{120};
  std::optional<std::uint64_t> seed;  // mock provider only
  double requests_per_second = 0.0;   // 0 disables the rate limiter
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
};

// Provenance of one generation call; enough to re-render and verify the prompt.
struct RunMetadata {
  std::string provider;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::string timestamp;    // ISO-8601 UTC
  std::string prompt_hash;  // sha256 of the exact prompt bytes
  bool operator==(const RunMetadata&) const = default;
};

// A text-generation and embedding backend. Implementations report failures
// as goalforge::Error; transient ones are marked retryable.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  virtual std::string generate(const std::string& prompt, const ProviderConfig& config) = 0;
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts, const ProviderConfig& config) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Spaces calls at least 1/rate seconds apart; callers queue in arrival order.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second, Sleeper sleeper = {});
  void acquire();
  double rate() const noexcept { return per_second_; }

 private:
  double per_second_;
  Sleeper sleeper_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_free_{};
};

struct GatewayStats {
  std::uint64_t calls = 0;          // generate() invocations
  std::uint64_t attempts = 0;       // provider generate attempts, including retries
  std::uint64_t retries = 0;
  std::uint64_t failures = 0;
  std::uint64_t safety_blocks = 0;
  std::uint64_t embed_calls = 0;
};

// Shared front door to a provider: input checks, retry with exponential
// backoff, rate limiting, embedding normalization and call statistics.
class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, ProviderConfig config, Sleeper sleeper = {});

  // Throws InvalidArgument for an empty prompt, SafetyBlocked as reported by
  // the provider, and ProviderError once retries are exhausted.
  std::string generate(const std::string& prompt);
  // One unit-length vector per input text, all of one dimension.
  std::vector<Embedding> embed(const std::vector<std::string>& texts);

  RunMetadata metadata_for(const std::string& prompt, const std::string& timestamp) const;

  GatewayStats stats() const;
  const ProviderConfig& config() const noexcept { return config_; }
  std::string provider_id() const { return provider_->id(); }

 private:
  template <typename Fn>
  auto with_retries(Fn&& fn) -> decltype(fn());

  std::shared_ptr<Provider> provider_;
  ProviderConfig config_;
  Sleeper sleeper_;
  RateLimiter limiter_;
  std::atomic<std::uint64_t> calls_{0}, attempts_{0}, retries_{0}, failures_{0}, safety_blocks_{0}, embed_calls_{0};
};

double cosine(const Embedding& a, const Embedding& b);
double l2_norm(const Embedding& v);
void normalize(Embedding& v);

}  // namespace goalforge
