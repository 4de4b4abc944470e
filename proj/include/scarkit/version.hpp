#pragma once

namespace scarkit {
inline constexpr const char* kVersion = "0.1.0";
}
