#pragma once

namespace sbtm {
inline constexpr const char* kVersion = "1.0.0";
}
