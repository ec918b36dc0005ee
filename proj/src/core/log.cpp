#include "verbatim/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace verbatim::log {

namespace {

Level initial_level() {
  const char* env = std::getenv("VERBATIM_LOG");
  if (!env) return Level::warn;
  const std::string v(env);
  if (v == "debug") return Level::debug;
  if (v == "info") return Level::info;
  if (v == "error") return Level::error;
  if (v == "off") return Level::off;
  return Level::warn;
}

std::atomic<Level> g_level{initial_level()};
std::mutex g_mutex;

constexpr const char* kNames[] = {"debug", "info", "warn", "error"};

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void write(Level lvl, std::string_view message) {
  if (lvl < g_level.load() || lvl == Level::off) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[" << kNames[static_cast<int>(lvl)] << "] " << message << '\n';
}

}  // namespace verbatim::log
