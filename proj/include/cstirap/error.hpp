#pragma once

#include <stdexcept>
#include <string>

namespace cstirap {

enum class ErrorCode {
  invalid_argument = 1,
  parse = 2,
  no_crossing = 3,
  integration = 4,
  degenerate = 5,
  unbracketed = 6,
  io = 7,
  internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cstirap
