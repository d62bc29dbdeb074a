#pragma once

namespace snsrs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace snsrs
