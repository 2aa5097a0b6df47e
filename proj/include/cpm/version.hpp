#pragma once

namespace cpm {
inline constexpr const char* version = "0.1.0";
}
