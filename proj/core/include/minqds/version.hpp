#pragma once

namespace minqds {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace minqds
