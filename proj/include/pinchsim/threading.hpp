#pragma once

namespace pinchsim {

// Caps OpenMP worker threads from the PINCHSIM_THREADS environment variable
// (unset or 0 = automatic). Returns the applied cap, 0 if automatic.
int apply_thread_cap_from_env();

// Explicit cap; 0 restores the automatic default.
void set_thread_cap(int num_threads);

int max_threads();

}  // namespace pinchsim
