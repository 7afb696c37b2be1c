#pragma once

// Library logger. Verbosity comes from the LMC_LOG_LEVEL environment
// variable (trace, debug, info, warn, error, off); the default is warn.

#include <cstdlib>
#include <memory>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace lmc {

inline spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::get("lmc");
    if (!l) l = spdlog::stderr_color_mt("lmc");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("LMC_LOG_LEVEL")) {
      l->set_level(spdlog::level::from_str(env));
    }
    return l;
  }();
  return *instance;
}

}  // namespace lmc
