#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace chaoslab {

// Philox4x32-10 counter-based block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A reproducible random stream keyed by (master seed, stream index). The n-th
// draw of a stream depends only on the key and n, so the way streams are laid
// out over threads cannot change any value.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  void fill_normal(std::span<double> out);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }
  // Number of 64-bit words consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t draws_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// Stream index for the chain `chain` of sub-experiment `part`. Parts keep
// independent ladders (e.g. different beta values) on disjoint streams.
constexpr std::uint64_t stream_id(std::uint64_t part, std::uint64_t chain) {
  return (part << 32) | (chain & 0xffffffffULL);
}

}  // namespace chaoslab
