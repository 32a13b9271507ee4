#pragma once

#include <string>

namespace tcat::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, silent = 4 };

/// Current threshold. Initialized once from the TCAT_LOG environment variable
/// (debug|info|warn|error|silent); defaults to warn.
Level threshold();
void set_threshold(Level level);

void write(Level level, const std::string& msg);

inline void debug(const std::string& m) { write(Level::debug, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void error(const std::string& m) { write(Level::error, m); }

} // namespace tcat::log
