#pragma once

// Counter-based random streams (Philox4x32-10). A stream is addressed by
// (seed, stream id); draws are a pure function of (seed, stream id, position), so
// independent trials reproduce bit-for-bit regardless of scheduling.

#include <array>
#include <cstdint>

namespace smoothkl {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Roles keep the substreams of one trial apart.
enum class StreamRole : std::uint32_t {
  train_data = 1,
  test_data = 2,
  contamination = 3,
  multistart = 4,
  network_init = 5,
  minibatch = 6,
  problem = 7,
  resample = 8,
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);
  RandomStream(std::uint64_t seed, std::uint64_t trial, StreamRole role)
      : RandomStream(seed, (trial << 8) | static_cast<std::uint32_t>(role)) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace smoothkl
