#pragma once

#include <stdexcept>
#include <string>

namespace tarc {

// Stable codes; the CLI uses them as process exit statuses.
enum class ErrorCode : int {
  invalid_argument = 2,
  parse = 3,
  not_found = 4,
  state = 5,
  io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tarc
