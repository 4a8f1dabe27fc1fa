#pragma once

#include <cstdint>
#include <random>

namespace pinchsim {

// One SplitMix64 step (Steele et al.). Used as the seed-mixing hash wherever a
// stream has to be derived from (master seed, index, index) tuples, so any
// single Monte Carlo draw or experiment row can be re-derived in isolation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stable two-index seed derivation: master -> mix in index_a -> mix in index_b.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index_a,
                                 std::uint64_t index_b = 0) {
  std::uint64_t s = master;
  std::uint64_t z = splitmix64_next(s);
  s = z ^ (0x9E3779B97F4A7C15ull * (index_a + 1));
  z = splitmix64_next(s);
  s = z ^ (0xD1B54A32D192ED03ull * (index_b + 1));
  return splitmix64_next(s);
}

// Deterministic random stream. The uniform mapping from raw 64-bit draws is
// fixed here rather than delegated to std::uniform_real_distribution (whose
// algorithm is implementation-defined), so identical seeds give identical
// streams on every platform and at every thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pinchsim
