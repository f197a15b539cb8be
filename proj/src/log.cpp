#include "henon/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace henon::log {

namespace {

Level from_env() {
  const char* v = std::getenv("HENON_LOG");
  if (v == nullptr) return Level::error;
  const std::string s(v);
  if (s == "debug") return Level::debug;
  if (s == "info") return Level::info;
  return Level::error;
}

std::atomic<int>& current() {
  static std::atomic<int> l{static_cast<int>(from_env())};
  return l;
}

std::mutex& sink() {
  static std::mutex m;
  return m;
}

void emit(const char* tag, std::string_view msg) {
  std::lock_guard lock(sink());
  std::cerr << "[" << tag << "] " << msg << '\n';
}

}  // namespace

Level level() { return static_cast<Level>(current().load()); }
void set_level(Level l) { current().store(static_cast<int>(l)); }

void error(std::string_view msg) { emit("error", msg); }
void info(std::string_view msg) {
  if (enabled(Level::info)) emit("info", msg);
}
void debug(std::string_view msg) {
  if (enabled(Level::debug)) emit("debug", msg);
}

}  // namespace henon::log
