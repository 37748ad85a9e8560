#pragma once

namespace qvir {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qvir
