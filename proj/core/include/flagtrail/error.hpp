#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flagtrail {

enum class ErrorCode : std::uint8_t {
  InvalidArgument,
  NotFound,
  AppendFailed,
  ImportFailed,
  PreconditionViolation,
  RejectedLocked,
  Forbidden,
  AuthFailure,
  ConsistencyViolation,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Import failure pinned to a 1-based line of the input.
class ImportError : public Error {
 public:
  ImportError(std::size_t line, const std::string& message)
      : Error(ErrorCode::ImportFailed, "line " + std::to_string(line) + ": " + message), line_(line), detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Replay found an event the engine rules would not have produced.
class ConsistencyError : public Error {
 public:
  ConsistencyError(std::uint64_t seq, const std::string& message)
      : Error(ErrorCode::ConsistencyViolation, "seq " + std::to_string(seq) + ": " + message), seq_(seq) {}

  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::uint64_t seq_;
};

}  // namespace flagtrail
