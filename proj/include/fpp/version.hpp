#pragma once

namespace fpp {

inline constexpr const char* kToolName = "fpp-lab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace fpp
