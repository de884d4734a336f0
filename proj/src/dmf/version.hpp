#pragma once

namespace dmf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dmf
