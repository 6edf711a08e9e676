#include "hybridmbqc/errors.hpp"

namespace hmq {

const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::rule: return "rule";
    case ErrorCode::config: return "config";
    case ErrorCode::run: return "run";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::io: return "io";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace hmq
