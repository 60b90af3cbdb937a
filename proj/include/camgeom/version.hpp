#pragma once

namespace camgeom {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace camgeom
