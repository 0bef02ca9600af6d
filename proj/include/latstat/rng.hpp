#pragma once

#include <cstdint>
#include <random>

namespace latstat {

// Seedable, splittable random stream. Every Monte Carlo replica draws from
// Stream(seed, replica), so results do not depend on scheduling. Doubles are
// built from the top 53 bits of mt19937_64 output, which keeps the streams
// identical across standard library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  // Uniform in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }
  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

  Stream split(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
};

}  // namespace latstat
