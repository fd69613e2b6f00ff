#pragma once

#include <string_view>

#ifndef RSGROVE_VERSION
#define RSGROVE_VERSION "0.0.0"
#endif

namespace rsgrove {

inline constexpr std::string_view kVersion = RSGROVE_VERSION;

// Stamped into every JSON artifact as "version".
inline constexpr std::string_view kVersionStamp = "rsgrove " RSGROVE_VERSION;

}  // namespace rsgrove
