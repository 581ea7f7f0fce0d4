#pragma once

namespace maxgas {

inline constexpr const char* kVersion = "0.1.0";

} // namespace maxgas
