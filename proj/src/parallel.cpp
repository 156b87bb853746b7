#include "mdist/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mdist {

unsigned worker_count() {
  if (const char* env = std::getenv("MDIST_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mdist
