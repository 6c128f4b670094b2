#include "goalforge/util.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "goalforge/error.hpp"

namespace goalforge {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

int parse_int(std::string_view text, std::string_view what, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::ParseError, "bad " + std::string(what) + " in '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split(std::string_view text, char separator) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(separator, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      break;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += separator;
    out += parts[i];
  }
  return out;
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'' || u >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::chrono::sys_days parse_date(std::string_view text) {
  using namespace std::chrono;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(Errc::ParseError, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = parse_int(text.substr(0, 4), "year", text);
  const int m = parse_int(text.substr(5, 2), "month", text);
  const int d = parse_int(text.substr(8, 2), "day", text);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(Errc::ParseError, "invalid calendar date '" + std::string(text) + "'");
  return sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day) {
  using namespace std::chrono;
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const std::string whole(text);
  if (text.size() < 10) throw Error(Errc::ParseError, "timestamp too short: '" + whole + "'");
  Timestamp t{parse_date(text.substr(0, 10))};
  if (text.size() == 10) return t;
  if (text[10] != 'T' && text[10] != ' ') throw Error(Errc::ParseError, "bad timestamp '" + whole + "'");
  if (text.size() < 19 || text[13] != ':' || text[16] != ':') {
    throw Error(Errc::ParseError, "bad time of day in '" + whole + "'");
  }
  const int hh = parse_int(text.substr(11, 2), "hour", text);
  const int mm = parse_int(text.substr(14, 2), "minute", text);
  const int ss = parse_int(text.substr(17, 2), "second", text);
  if (hh > 23 || mm > 59 || ss > 60) throw Error(Errc::ParseError, "time out of range in '" + whole + "'");
  t += hours{hh} + minutes{mm} + seconds{ss};
  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    std::size_t i = 1;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
    rest.remove_prefix(i);
  }
  if (rest.empty() || rest == "Z") return t;
  if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 && rest[3] == ':') {
    const int oh = parse_int(rest.substr(1, 2), "offset hour", text);
    const int om = parse_int(rest.substr(4, 2), "offset minute", text);
    const auto offset = hours{oh} + minutes{om};
    return rest.front() == '+' ? t - offset : t + offset;
  }
  throw Error(Errc::ParseError, "bad zone designator in '" + whole + "'");
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const auto tod = t - day;
  const auto h = duration_cast<hours>(tod);
  const auto m = duration_cast<minutes>(tod - h);
  const auto s = tod - h - m;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(day).c_str(), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<int>(s.count()));
  return buf;
}

std::chrono::seconds parse_iso8601_duration(std::string_view text) {
  const std::string whole(text);
  if (text.size() < 3 || text[0] != 'P') throw Error(Errc::ParseError, "bad duration '" + whole + "'");
  long long total = 0;
  long long value = 0;
  bool have_digits = false;
  bool in_time = false;
  for (std::size_t i = 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c == 'T') {
      in_time = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      value = value * 10 + (c - '0');
      have_digits = true;
    } else {
      if (!have_digits) throw Error(Errc::ParseError, "bad duration '" + whole + "'");
      switch (c) {
        case 'D': total += value * 86400; break;
        case 'H': total += value * 3600; break;
        case 'M': total += in_time ? value * 60 : value * 30 * 86400; break;
        case 'S': total += value; break;
        case 'W': total += value * 7 * 86400; break;
        default: throw Error(Errc::ParseError, "bad duration unit in '" + whole + "'");
      }
      value = 0;
      have_digits = false;
    }
  }
  if (have_digits) throw Error(Errc::ParseError, "dangling number in duration '" + whole + "'");
  return std::chrono::seconds{total};
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::IoError, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

}  // namespace goalforge
