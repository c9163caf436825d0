#include "quest/errors.hpp"

namespace quest {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::NoCornerstones: return "NoCornerstones";
    case ErrorKind::ResourceExhausted: return "ResourceExhausted";
    case ErrorKind::RefusedSize: return "RefusedSize";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace quest
