#pragma once

namespace lbb {

inline constexpr const char* version = "0.1.0";

}  // namespace lbb
