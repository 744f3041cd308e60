#pragma once

#include <string>

namespace qbx {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

// Level from QBXFMM_LOG ("quiet", "info", "debug" or 0..2), read once.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace qbx
