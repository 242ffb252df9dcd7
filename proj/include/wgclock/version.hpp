#pragma once

namespace wgclock {
inline constexpr const char* kVersion = "0.3.0";
}
