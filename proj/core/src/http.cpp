#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "http.hpp"

#include <cctype>
#include <charconv>

#include "goalforge/error.hpp"

namespace goalforge::detail {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::InvalidArgument, "not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse convert(const httplib::Result& result, const std::string& url) {
  if (!result) {
    throw Error(Errc::NetworkError, "request to " + url + " failed: " + httplib::to_string(result.error()))
        .with_retryable(true);
  }
  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [name, value] : result->headers) {
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    response.headers[lower] = value;
  }
  return response;
}

httplib::Client make_client(const std::string& origin, std::chrono::seconds timeout) {
  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(true);
  return client;
}

}  // namespace

HttpResponse http_get(const std::string& url, std::chrono::seconds timeout) {
  const auto parts = split_url(url);
  auto client = make_client(parts.origin, timeout);
  return convert(client.Get(parts.target), url);
}

HttpResponse http_post_json(const std::string& url, const std::string& body, std::chrono::seconds timeout) {
  const auto parts = split_url(url);
  auto client = make_client(parts.origin, timeout);
  return convert(client.Post(parts.target, body, "application/json"), url);
}

std::string url_encode(const std::string& value) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

void throw_for_status(const HttpResponse& response, const std::string& what) {
  const std::string message = what + " returned HTTP " + std::to_string(response.status);
  if (response.status == 401 || response.status == 403) throw Error(Errc::AuthError, message);
  if (response.status == 429) {
    Error e(Errc::QuotaExceeded, message);
    e.with_retryable(true);
    const std::string after = response.header("retry-after");
    long long seconds = 0;
    auto [ptr, ec] = std::from_chars(after.data(), after.data() + after.size(), seconds);
    if (!after.empty() && ec == std::errc{} && ptr == after.data() + after.size()) {
      e.with_retry_after(std::chrono::seconds{seconds});
    }
    throw e;
  }
  if (response.status >= 500) throw Error(Errc::ProviderError, message).with_retryable(true);
  throw Error(Errc::ProviderError, message);
}

}  // namespace goalforge::detail
