#include "pinchsim/threading.hpp"

#include <omp.h>

#include <cstdlib>

namespace pinchsim {

namespace {
int default_threads() {
  static const int n = omp_get_max_threads();
  return n;
}
}  // namespace

void set_thread_cap(int num_threads) {
  omp_set_num_threads(num_threads > 0 ? num_threads : default_threads());
}

int apply_thread_cap_from_env() {
  default_threads();  // capture before any cap is applied
  const char* env = std::getenv("PINCHSIM_THREADS");
  if (env == nullptr) return 0;
  const int n = std::atoi(env);
  if (n > 0) omp_set_num_threads(n);
  return n > 0 ? n : 0;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace pinchsim
