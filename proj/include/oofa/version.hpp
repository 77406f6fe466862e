#pragma once

namespace oofa {
inline constexpr const char* version = "0.1.0";
}
