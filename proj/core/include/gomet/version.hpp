#pragma once

namespace gomet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gomet
