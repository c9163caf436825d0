#pragma once

#include <stdexcept>
#include <string>

namespace quest {

enum class ErrorKind {
  NotFound,
  ParseError,
  ConfigError,
  EmptyGraph,
  NoCornerstones,
  ResourceExhausted,
  RefusedSize,
  InvariantViolation,
};

const char* to_string(ErrorKind kind);

// All library errors are thrown as quest::Error. The CLI maps is_io()
// failures to exit code 1 and everything else (domain errors) to 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  bool is_io() const noexcept {
    return kind_ == ErrorKind::NotFound || kind_ == ErrorKind::ParseError;
  }

 private:
  ErrorKind kind_;
};

}  // namespace quest
