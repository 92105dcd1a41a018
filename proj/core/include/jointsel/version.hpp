#pragma once

namespace jointsel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jointsel
