#pragma once
#include <array>
#include <cmath>
#include <cstdint>

namespace rdlab {

// Philox4x32-10 counter-based generator. Streams are addressed by
// (seed, stream_id): the key is the 64-bit seed, counter words 0..1 hold the
// stream id and words 2..3 a block counter, so any path of a Monte Carlo run
// can be reproduced independently of scheduling or worker count.
struct Philox4x32 {
  static constexpr uint32_t M0 = 0xD2511F53u;
  static constexpr uint32_t M1 = 0xCD9E8D57u;
  static constexpr uint32_t W0 = 0x9E3779B9u;
  static constexpr uint32_t W1 = 0xBB67AE85u;

  static inline void round_once(std::array<uint32_t, 4>& x, uint32_t k0, uint32_t k1) {
    const uint64_t p0 = static_cast<uint64_t>(M0) * x[0];
    const uint64_t p1 = static_cast<uint64_t>(M1) * x[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint64_t>(p1) >> 32, lo1 = static_cast<uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
  }

  static inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                              uint32_t k0, uint32_t k1) {
    for (int r = 0; r < 10; ++r) {
      round_once(ctr, k0, k1);
      k0 += W0;
      k1 += W1;
    }
    return ctr;
  }
};

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id)
      : k0_(static_cast<uint32_t>(seed)),
        k1_(static_cast<uint32_t>(seed >> 32)),
        s0_(static_cast<uint32_t>(stream_id)),
        s1_(static_cast<uint32_t>(stream_id >> 32)) {}

  uint32_t next_u32() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  uint64_t next_u64() {
    const uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on (0,1]: never returns 0, so logarithms are safe.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return cached_normal_;
    }
    const double u1 = uniform01(), u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_normal_ = r * std::sin(a);
    have_normal_ = true;
    return r * std::cos(a);
  }

 private:
  void refill() {
    buf_ = Philox4x32::block({s0_, s1_, static_cast<uint32_t>(block_),
                              static_cast<uint32_t>(block_ >> 32)},
                             k0_, k1_);
    ++block_;
    have_ = 4;
  }

  uint32_t k0_, k1_, s0_, s1_;
  uint64_t block_ = 0;
  std::array<uint32_t, 4> buf_{};
  int have_ = 0;
  bool have_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace rdlab
