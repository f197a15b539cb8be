#pragma once

#include <string_view>

namespace henon::log {

enum class Level { error = 0, info = 1, debug = 2 };

/// Level from HENON_LOG (error | info | debug); defaults to error. Read once.
Level level();
void set_level(Level level);

void error(std::string_view msg);
void info(std::string_view msg);
void debug(std::string_view msg);

inline bool enabled(Level l) { return static_cast<int>(l) <= static_cast<int>(level()); }

}  // namespace henon::log
