#pragma once

namespace coherence {

inline constexpr const char* tool_name = "coherence-kit";
inline constexpr const char* version = "0.1.0";

} // namespace coherence
