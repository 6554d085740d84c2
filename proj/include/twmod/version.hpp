#pragma once

namespace twmod {

inline constexpr const char* version = "0.1.0";
inline constexpr const char* json_schema = "twmod/1";

} // namespace twmod
