#pragma once

namespace qgibbs {
inline constexpr const char* kVersion = "0.1.0";
}
