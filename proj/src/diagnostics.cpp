#include "qpml/diagnostics.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace qpml {

namespace {
std::atomic<int> g_verbosity{0};
std::mutex g_mutex;
std::vector<std::string> g_warnings;
}  // namespace

void set_verbosity(int level) { g_verbosity = level; }
int verbosity() { return g_verbosity; }

void warn(const std::string& message) {
  std::lock_guard lock(g_mutex);
  std::cerr << "qpml: warning: " << message << '\n';
  g_warnings.push_back(message);
}

void note(int level, const std::string& message) {
  if (level > g_verbosity) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "qpml: " << message << '\n';
}

std::vector<std::string> take_warnings() {
  std::lock_guard lock(g_mutex);
  return std::exchange(g_warnings, {});
}

}  // namespace qpml
