#include "goalforge/error.hpp"

namespace goalforge {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingGoal: return "MissingGoal";
    case Errc::AuthError: return "AuthError";
    case Errc::QuotaExceeded: return "QuotaExceeded";
    case Errc::NetworkError: return "NetworkError";
    case Errc::MissingSlot: return "MissingSlot";
    case Errc::UnknownSlot: return "UnknownSlot";
    case Errc::ProviderError: return "ProviderError";
    case Errc::SafetyBlocked: return "SafetyBlocked";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::Unparseable: return "Unparseable";
    case Errc::AnnotationFailed: return "AnnotationFailed";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NoCandidates: return "NoCandidates";
    case Errc::ExtractionFailed: return "ExtractionFailed";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::IncompleteDataset: return "IncompleteDataset";
    case Errc::SynthesisFailed: return "SynthesisFailed";
    case Errc::IncompatibleVersion: return "IncompatibleVersion";
    case Errc::IntegrityViolation: return "IntegrityViolation";
    case Errc::StagePrerequisiteMissing: return "StagePrerequisiteMissing";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error& Error::with_path(std::string path) {
  path_ = std::move(path);
  return *this;
}

Error& Error::with_retryable(bool retryable) {
  retryable_ = retryable;
  return *this;
}

Error& Error::with_retry_after(std::chrono::seconds delay) {
  retry_after_ = delay;
  retryable_ = true;
  return *this;
}

Error Error::schema_violation(std::string path, const std::string& reason) {
  Error e(Errc::SchemaViolation, path + ": " + reason);
  e.with_path(std::move(path));
  return e;
}

}  // namespace goalforge
