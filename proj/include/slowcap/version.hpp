#pragma once

// ============================================================================
// slowcap -- version information
// ============================================================================

namespace slowcap {

inline constexpr const char* version_string = "0.1.0";

} // namespace slowcap
