#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace floodscout {

enum class ErrorCode {
  validation,   // input violates a documented precondition
  domain,       // coordinate or parameter outside its mathematical domain
  parse,        // malformed file or document
  not_found,
  conflict,     // duplicate id/name, out-of-order epoch, illegal transition
  infeasible,   // e.g. a single survey line longer than the sortie endurance
  io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace floodscout
