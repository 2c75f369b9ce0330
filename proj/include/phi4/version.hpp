#pragma once

namespace phi4 {
inline constexpr const char* kVersion = "0.1.0";
}
