#pragma once

#include <string>

namespace sparks {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Level comes from the SPARKS_LOG environment variable
// (error|warn|info|debug), default warn.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

inline void log_warn(const std::string& m) { log(LogLevel::kWarn, m); }
inline void log_info(const std::string& m) { log(LogLevel::kInfo, m); }
inline void log_debug(const std::string& m) { log(LogLevel::kDebug, m); }

}  // namespace sparks
