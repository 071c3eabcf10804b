#include "stochgm/parallel.hpp"

#include <atomic>
#include <thread>

namespace stochgm {
namespace {
std::atomic<int> g_jobs{0};
}

void set_jobs(int jobs) { g_jobs.store(jobs < 0 ? 0 : jobs); }

int jobs() noexcept {
  const int j = g_jobs.load();
  if (j > 0) return j;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace stochgm
