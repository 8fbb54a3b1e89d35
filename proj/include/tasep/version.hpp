#pragma once

namespace tasep {
inline constexpr const char* kVersion = "0.1.0";
}
