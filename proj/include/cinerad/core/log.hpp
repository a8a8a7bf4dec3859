#pragma once

#include <iostream>
#include <mutex>
#include <string>

namespace cinerad::log {

inline std::mutex& mu() {
  static std::mutex m;
  return m;
}

inline void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lk(mu());
  std::cerr << "[warn] " << msg << "\n";
}

inline void info(const std::string& msg) {
  std::lock_guard<std::mutex> lk(mu());
  std::cerr << "[info] " << msg << "\n";
}

}  // namespace cinerad::log
