#pragma once

#include <stdexcept>
#include <string>

namespace hmq {

// Error categories, mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  parse = 1,
  rule = 2,
  config = 3,
  run = 4,
  capacity = 5,
  io = 6,
  invalid_argument = 7,
  numerical = 8,
};

// Stable lowercase name of a code, e.g. "rule"; used in logs and sweep rows.
const char* code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hmq
