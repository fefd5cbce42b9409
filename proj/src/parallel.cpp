#include "covermech/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace covermech {

int worker_threads() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("COVERMECH_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return n < 1 ? 1 : n;
}

}  // namespace covermech
