#include "coreprune/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

namespace coreprune::log {

namespace {

Level from_env() {
  const char* env = std::getenv("COREPRUNE_LOG");
  if (!env) return Level::Error;
  const std::string value(env);
  if (value == "debug") return Level::Debug;
  if (value == "info") return Level::Info;
  return Level::Error;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

constexpr const char* tag(Level level) {
  switch (level) {
    case Level::Error: return "error";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }
void set_threshold(Level level) { current().store(static_cast<int>(level)); }

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) > current().load()) return;
  std::cerr << "[coreprune " << tag(level) << "] " << message << '\n';
}

}  // namespace coreprune::log
