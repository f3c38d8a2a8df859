#pragma once

namespace mpgrowth {
inline constexpr const char* version = "1.0.0";
inline constexpr int json_schema_version = 1;
}  // namespace mpgrowth
