#pragma once

namespace hlat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hlat
