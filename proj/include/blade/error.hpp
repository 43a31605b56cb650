#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace blade {

enum class Severity { error, warning };

/// One diagnostic produced while checking inputs against each other.
struct Finding {
  Severity severity = Severity::error;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

std::string_view to_string(Severity s);

/// Broad failure classes. The CLI maps these onto exit codes and the
/// service onto HTTP statuses, so every thrown error must pick one.
enum class ErrorClass { validation, not_found, format, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& message) : std::runtime_error(message), class_(cls) {}

  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

/// Input is well-formed but breaks a domain rule.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::vector<Finding> findings = {})
      : Error(ErrorClass::validation, message), findings_(std::move(findings)) {}

  const std::vector<Finding>& findings() const noexcept { return findings_; }

 private:
  std::vector<Finding> findings_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message) : Error(ErrorClass::not_found, message) {}
};

/// Input could not be read or parsed at all.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error(ErrorClass::format, message) {}
};

}  // namespace blade
