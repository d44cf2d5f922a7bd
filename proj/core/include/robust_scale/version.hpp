#pragma once

namespace robust_scale {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace robust_scale
