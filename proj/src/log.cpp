#include "qbx/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace qbx {

namespace {

LogLevel from_env() {
  const char* v = std::getenv("QBXFMM_LOG");
  if (!v) return LogLevel::Quiet;
  const std::string s(v);
  if (s == "debug" || s == "2") return LogLevel::Debug;
  if (s == "info" || s == "1") return LogLevel::Info;
  return LogLevel::Quiet;
}

std::atomic<int>& level_ref() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

void emit(const char* tag, const std::string& msg) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[qbxfmm " << tag << "] " << msg << '\n';
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_ref().load()); }
void set_log_level(LogLevel level) { level_ref().store(static_cast<int>(level)); }

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) emit("debug", msg);
}

}  // namespace qbx
