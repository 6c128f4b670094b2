#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace goalforge {

enum class Errc {
  InvalidArgument,
  IoError,
  ParseError,
  MissingGoal,
  AuthError,
  QuotaExceeded,
  NetworkError,
  MissingSlot,
  UnknownSlot,
  ProviderError,
  SafetyBlocked,
  SchemaViolation,
  Unparseable,
  AnnotationFailed,
  EmptyDataset,
  NoCandidates,
  ExtractionFailed,
  EmptyGraph,
  IncompleteDataset,
  SynthesisFailed,
  IncompatibleVersion,
  IntegrityViolation,
  StagePrerequisiteMissing,
};

std::string_view to_string(Errc code) noexcept;

// Every failure surfaced by the library is an Error carrying a stable code.
// `path` is the document path for SchemaViolation and the offending
// line/field for ParseError. `retryable` marks transient provider and
// transport failures that the gateway may retry.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }
  bool retryable() const noexcept { return retryable_; }
  std::optional<std::chrono::seconds> retry_after() const noexcept { return retry_after_; }

  Error& with_path(std::string path);
  Error& with_retryable(bool retryable = true);
  Error& with_retry_after(std::chrono::seconds delay);

  static Error schema_violation(std::string path, const std::string& reason);

 private:
  Errc code_;
  std::string path_;
  bool retryable_ = false;
  std::optional<std::chrono::seconds> retry_after_;
};

}  // namespace goalforge
