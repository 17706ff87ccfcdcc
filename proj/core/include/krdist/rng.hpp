#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace krdist {

// Philox4x32-10 counter-based generator. The key comes from the master seed
// and the 64-bit stream id occupies the upper half of the counter, so each
// (seed, stream) pair is an independent reproducible sequence.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();

  // One application of the bijection: 10 rounds on `ctr` under `key`.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> ctr_{};
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

// Generator for replicate `r` of an experiment seeded with `master`.
Philox replicate_rng(std::uint64_t master, std::uint64_t r);

// Derives a sub-seed from a seed and a label; used to separate independent
// roles (for example proxy construction versus simulation).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);

}  // namespace krdist
