#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace goalforge {

using Timestamp = std::chrono::sys_seconds;

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char separator);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
bool starts_with_ci(std::string_view text, std::string_view prefix);

// Whitespace-delimited token count.
std::size_t word_count(std::string_view text);

// Lower-cased runs of letters, digits and apostrophes.
std::vector<std::string> tokenize_words(std::string_view text);

// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SSZ" and "YYYY-MM-DDTHH:MM:SS(.fff)(+HH:MM)".
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);
std::chrono::sys_days parse_date(std::string_view text);
std::string format_date(std::chrono::sys_days day);
// "PT#H#M#S" as used by video platform APIs.
std::chrono::seconds parse_iso8601_duration(std::string_view text);

std::string sha256_hex(std::string_view data);
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t mix64(std::uint64_t x);

// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown
// by any call is rethrown after all threads finish.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace goalforge
