#pragma once

#include <string_view>

namespace ringcrystal {

inline constexpr std::string_view kToolName = "ringcrystal";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace ringcrystal
