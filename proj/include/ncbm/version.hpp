#pragma once

namespace ncbm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace ncbm
