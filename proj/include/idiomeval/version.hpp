#pragma once

#include <string_view>

namespace idiomeval {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kCorpusFormatVersion = "1";

}  // namespace idiomeval
