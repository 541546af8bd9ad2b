#pragma once

namespace eurlab {
inline constexpr const char* kVersion = "0.1.0";
}
