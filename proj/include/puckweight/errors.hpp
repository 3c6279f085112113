#pragma once

#include <stdexcept>
#include <string>

namespace puckweight {

// Error categories map onto distinct CLI exit codes; library code throws,
// the CLI translates.
enum class ErrorCategory {
  Usage,          // bad flags / arguments
  MissingInput,   // referenced file does not exist
  SchemaVersion,  // input file carries an unsupported version line
  Parse,          // malformed content in an input file
  Data,           // semantically invalid data (overlaps, missing players, ...)
  Numeric,        // fitting / solving failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::MissingInput: return "missing-input";
    case ErrorCategory::SchemaVersion: return "schema-version";
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Data: return "data";
    case ErrorCategory::Numeric: return "numeric";
  }
  return "unknown";
}

}  // namespace puckweight
