#pragma once

namespace hmq {

// Keep in sync with the project() version in the top-level CMakeLists.txt.
inline constexpr const char kVersion[] = "0.1.0";

}  // namespace hmq
