#pragma once

#include <string_view>

namespace vergen {

// Minimal stderr logger. Level is controlled by VERGEN_LOG (quiet|warn|info),
// default warn. Safe for concurrent use.
void log_warn(std::string_view message);
void log_info(std::string_view message);

} // namespace vergen
