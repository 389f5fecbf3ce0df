#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

enum class ErrorCode {
  invalid_argument,
  parse,
  schema,
  degenerate,
  no_solution,
  not_converged,
  io,
  internal,
};

// Base exception for the library. Callers that need to map failures onto
// exit codes switch on code().
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace gsr
