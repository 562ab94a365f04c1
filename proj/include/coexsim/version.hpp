#pragma once

namespace coexsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace coexsim
