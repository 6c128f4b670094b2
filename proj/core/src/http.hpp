#pragma once

// Minimal HTTP client used by the live provider and the video-platform
// client. Kept private so only one translation unit compiles httplib.

#include <chrono>
#include <map>
#include <string>

namespace goalforge::detail {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // lower-cased names

  std::string header(const std::string& lower_name) const {
    auto it = headers.find(lower_name);
    return it == headers.end() ? std::string() : it->second;
  }
};

// `url` is absolute (http:// or https://). Transport failures throw a
// retryable NetworkError; any HTTP status is returned to the caller.
HttpResponse http_get(const std::string& url, std::chrono::seconds timeout);
HttpResponse http_post_json(const std::string& url, const std::string& body, std::chrono::seconds timeout);

std::string url_encode(const std::string& value);

// Maps common failure statuses to library errors: 401/403 AuthError,
// 429 QuotaExceeded (retryable, honours Retry-After), 5xx retryable
// ProviderError, other >= 400 non-retryable ProviderError.
[[noreturn]] void throw_for_status(const HttpResponse& response, const std::string& what);

}  // namespace goalforge::detail
