#pragma once

namespace hrrp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hrrp
