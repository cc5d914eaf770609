#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fep {

/// A reproducible random stream. Distinct `stream` ids under one seed give
/// independent sequences, one per replica.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    ++position_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Exponential waiting time, inverse transform.
  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
  /// Number of uniforms drawn so far.
  [[nodiscard]] std::uint64_t position() const noexcept { return position_; }

  /// Stream `id` under the same seed.
  [[nodiscard]] RngStream split(std::uint64_t id) const { return RngStream(seed_, id); }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
};

}  // namespace fep
