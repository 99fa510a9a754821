#pragma once

#include <stdexcept>
#include <string>

namespace ciliaflow {

enum class ErrorCode {
  coincident_beads,
  separation_too_small,
  negative_height,
  numerical_blowup,
  empty_trajectory,
  division_by_zero,
  line_search_failure,
  parse_error,
  validation_error,
  io_error,
  invalid_argument,
};

const char* to_string(ErrorCode code) noexcept;

// Validation-class errors map to exit code 1, numerical ones to 2.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by config validation; key() names the offending setting.
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& what)
      : Error(ErrorCode::validation_error, key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ciliaflow
