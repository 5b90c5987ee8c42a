#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace perfmodel {

/// Base class for every error raised by the library.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed profile text (bad JSON, wrong types, missing fields).
class ParseError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Filesystem failures: unreadable or unwritable paths.
class IoError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Profile or scenario invariant violations. Carries every violated
/// invariant, not just the first one found.
class ValidationError : public ModelError {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : ModelError(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace perfmodel
