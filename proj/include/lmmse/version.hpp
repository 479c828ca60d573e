#pragma once

namespace lmmse {

inline constexpr const char* kToolName = "lmmse-mismatch";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace lmmse
