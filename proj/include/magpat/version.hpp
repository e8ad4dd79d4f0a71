#pragma once

namespace magpat {
inline constexpr const char kVersion[] = "0.1.0";
}
