#pragma once

namespace spectramass {

inline constexpr const char* kVersion = "0.1.0";

} // namespace spectramass
