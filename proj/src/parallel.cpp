#include "egolex/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace egolex {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

int apply_thread_env() {
  if (const char* env = std::getenv("EGOLEX_THREADS")) {
    try {
      set_thread_count(std::stoi(env));
    } catch (const std::exception&) {
      // unparsable value: leave the OpenMP default
    }
  }
  return thread_count();
}

}  // namespace egolex
