#pragma once

namespace odnet {

inline constexpr const char* version = "0.1.0";

} // namespace odnet
