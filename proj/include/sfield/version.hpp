#pragma once

namespace sfield {
inline constexpr const char* kVersion = "0.1.0";
}
