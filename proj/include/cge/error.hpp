#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cge {

enum class ErrorCode {
  SyntaxError,
  UnknownProcedure,
  ConflictingModule,
  EmptyGraph,
  InvalidGraph,
  MissingFile,
  InvalidManifest,
  DuplicateVersion,
  InvalidThreshold,
  UnsupportedSize,
  MalformedInput,
  InvalidParams,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownProcedure: return "UnknownProcedure";
    case ErrorCode::ConflictingModule: return "ConflictingModule";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::DuplicateVersion: return "DuplicateVersion";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// User-facing failure: bad input, bad thresholds, missing files.
/// Anything else escaping the library is an internal error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace cge
