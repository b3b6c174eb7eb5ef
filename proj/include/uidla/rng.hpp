#pragma once

#include <cmath>
#include <cstdint>

namespace uidla {

/// Counter-based deterministic random stream (Philox-4x32-10).
///
/// A stream is fully determined by (seed, stream_id): the same pair yields
/// the same sequence on every platform and run. Distinct stream_ids give
/// statistically independent streams, so replica j can hand particle k the
/// stream id j * 2^32 + k without any cross-talk.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(uint64_t seed, uint64_t stream_id)
      : key0_(uint32_t(seed)), key1_(uint32_t(seed >> 32)),
        stream_lo_(uint32_t(stream_id)), stream_hi_(uint32_t(stream_id >> 32)) {}

  uint64_t seed() const { return uint64_t(key1_) << 32 | key0_; }
  uint64_t stream_id() const { return uint64_t(stream_hi_) << 32 | stream_lo_; }

  uint64_t u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    uint32_t x0 = uint32_t(counter_), x1 = uint32_t(counter_ >> 32);
    uint32_t x2 = stream_lo_, x3 = stream_hi_;
    uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      uint64_t p0 = uint64_t(0xD2511F53u) * x0;
      uint64_t p1 = uint64_t(0xCD9E8D57u) * x2;
      uint32_t y0 = uint32_t(p1 >> 32) ^ x1 ^ k0;
      uint32_t y1 = uint32_t(p1);
      uint32_t y2 = uint32_t(p0 >> 32) ^ x3 ^ k1;
      uint32_t y3 = uint32_t(p0);
      x0 = y0; x1 = y1; x2 = y2; x3 = y3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    ++counter_;
    spare_ = uint64_t(x2) << 32 | x3;
    have_spare_ = true;
    return uint64_t(x0) << 32 | x1;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to pass to log().
  double uniform_open0() { return double((u64() >> 11) + 1) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, n). n must be positive.
  uint64_t below(uint64_t n) {
    unsigned __int128 m = (unsigned __int128)u64() * n;
    uint64_t lo = uint64_t(m);
    if (lo < n) {
      uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = (unsigned __int128)u64() * n;
        lo = uint64_t(m);
      }
    }
    return uint64_t(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Bernoulli with exactly rational probability num/den.
  bool bernoulli_ratio(uint64_t num, uint64_t den) { return below(den) < num; }

  /// Number of failures before the first success, success probability p
  /// given as num/den (support {0, 1, 2, ...}).
  uint64_t geometric_failures(uint64_t num, uint64_t den) {
    uint64_t k = 0;
    while (!bernoulli_ratio(num, den)) ++k;
    return k;
  }

  double exponential(double mean) { return -mean * std::log(uniform_open0()); }

 private:
  uint32_t key0_, key1_;
  uint32_t stream_lo_, stream_hi_;
  uint64_t counter_ = 0;
  uint64_t spare_ = 0;
  bool have_spare_ = false;
};

/// Factory for the per-particle stream layout (seed, replica * 2^32 + k).
/// Keeps particle k of replica j reproducible regardless of scheduling.
struct StreamFamily {
  uint64_t seed = 0;
  uint64_t replica = 0;

  RngStream particle(uint64_t k) const {
    return RngStream(seed, (replica << 32) + k);
  }
  StreamFamily with_replica(uint64_t j) const { return StreamFamily{seed, j}; }
};

}  // namespace uidla
