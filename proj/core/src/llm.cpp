#include "goalforge/llm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace {

Sleeper default_sleeper(Sleeper s) {
  if (s) return s;
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

}  // namespace

RateLimiter::RateLimiter(double per_second, Sleeper sleeper)
    : per_second_(per_second), sleeper_(default_sleeper(std::move(sleeper))) {
  if (per_second < 0) throw Error(Errc::InvalidArgument, "rate must be non-negative");
}

void RateLimiter::acquire() {
  if (per_second_ <= 0) return;
  using namespace std::chrono;
  const auto interval = duration_cast<steady_clock::duration>(duration<double>(1.0 / per_second_));
  steady_clock::duration wait{};
  {
    std::lock_guard lock(mutex_);
    const auto now = steady_clock::now();
    if (next_free_ < now) next_free_ = now;
    wait = next_free_ - now;
    next_free_ += interval;
  }
  if (wait > steady_clock::duration::zero()) sleeper_(ceil<milliseconds>(wait));
}

Gateway::Gateway(std::shared_ptr<Provider> provider, ProviderConfig config, Sleeper sleeper)
    : provider_(std::move(provider)),
      config_(std::move(config)),
      sleeper_(default_sleeper(std::move(sleeper))),
      limiter_(config_.requests_per_second, sleeper_) {
  if (!provider_) throw Error(Errc::InvalidArgument, "gateway needs a provider");
  if (config_.max_retries < 0) throw Error(Errc::InvalidArgument, "max_retries must be >= 0");
}

template <typename Fn>
auto Gateway::with_retries(Fn&& fn) -> decltype(fn()) {
  auto backoff = config_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    limiter_.acquire();
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() == Errc::SafetyBlocked) {
        ++safety_blocks_;
        throw;
      }
      if (!e.retryable()) {
        ++failures_;
        throw;
      }
      if (attempt >= config_.max_retries) {
        ++failures_;
        throw Error(Errc::ProviderError,
                    "giving up after " + std::to_string(attempt) + " retries: " + std::string(e.what()));
      }
      ++retries_;
      auto delay = backoff;
      if (e.retry_after()) delay = std::chrono::duration_cast<std::chrono::milliseconds>(*e.retry_after());
      sleeper_(std::min(delay, config_.max_backoff));
      backoff = std::min(backoff * 2, config_.max_backoff);
    }
  }
}

std::string Gateway::generate(const std::string& prompt) {
  if (prompt.empty()) throw Error(Errc::InvalidArgument, "prompt must be non-empty");
  ++calls_;
  return with_retries([&] {
    ++attempts_;
    return provider_->generate(prompt, config_);
  });
}

std::vector<Embedding> Gateway::embed(const std::vector<std::string>& texts) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw Error(Errc::InvalidArgument, "text " + std::to_string(i) + " to embed is empty");
  }
  if (texts.empty()) return {};
  ++embed_calls_;
  auto vectors = with_retries([&] { return provider_->embed(texts, config_); });
  if (vectors.size() != texts.size()) {
    throw Error(Errc::ProviderError, "provider returned " + std::to_string(vectors.size()) + " vectors for " +
                                         std::to_string(texts.size()) + " texts");
  }
  for (auto& v : vectors) {
    if (v.empty() || v.size() != vectors.front().size()) throw Error(Errc::ProviderError, "ragged embedding batch");
    if (l2_norm(v) == 0.0) throw Error(Errc::ProviderError, "provider returned a zero vector");
    normalize(v);
  }
  return vectors;
}

RunMetadata Gateway::metadata_for(const std::string& prompt, const std::string& timestamp) const {
  return {provider_->id(), config_.generation_model, config_.seed, timestamp, sha256_hex(prompt)};
}

GatewayStats Gateway::stats() const {
  return {calls_.load(), attempts_.load(), retries_.load(), failures_.load(), safety_blocks_.load(),
          embed_calls_.load()};
}

double l2_norm(const Embedding& v) {
  double sum = 0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void normalize(Embedding& v) {
  const double n = l2_norm(v);
  if (n == 0.0) return;
  for (double& x : v) x /= n;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw Error(Errc::InvalidArgument, "cosine of vectors with different dimensions");
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double denom = l2_norm(a) * l2_norm(b);
  if (denom == 0.0) return 0.0;
  return std::clamp(dot / denom, -1.0, 1.0);
}

}  // namespace goalforge
