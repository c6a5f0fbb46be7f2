#pragma once

#include <stdexcept>
#include <string>

namespace surfzeta {

enum class ErrorKind {
  input,
  config,
  validation,
  construction,
  numeric,
  domain,
  resource,
  pole_proximity,
  degenerate_multiplier,
  completeness,
  bracketing,
  staleness,
  corruption,
  consistency,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace surfzeta
