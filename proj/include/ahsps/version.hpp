#pragma once

namespace ahsps {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace ahsps
