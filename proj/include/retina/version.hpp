#pragma once

namespace retina {

inline constexpr const char* kToolName = "retina-vasc";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace retina
