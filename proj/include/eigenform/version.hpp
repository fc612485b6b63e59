#pragma once

namespace eigenform {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eigenform
