#pragma once

#include <cstdint>
#include <random>

namespace verif {

/// SplitMix64 finalizer applied to `x + golden_gamma`. Stateless.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed fed to MT19937-64 for sample `stream_id` of an experiment seeded with
/// `root_seed`. Part of the report format: changing it changes every report.
constexpr std::uint64_t derive_stream_seed(std::uint64_t root_seed,
                                           std::uint64_t stream_id) noexcept {
  return splitmix64(root_seed ^ splitmix64(stream_id));
}

/// One independent random stream per Monte Carlo sample.
///
/// Streams are owned by a single worker at a time and are not thread-safe.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_id)
      : engine_(derive_stream_seed(root_seed, stream_id)),
        root_seed_(root_seed),
        stream_id_(stream_id) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform value on [-1/2, 1/2) with 53-bit granularity. The closed upper
  /// endpoint of the textbook definition has probability zero and is omitted.
  double next_unit_centered() { return unit_centered(engine_()); }

  /// Maps one raw 64-bit draw to [-1/2, 1/2).
  static constexpr double unit_centered(std::uint64_t raw) noexcept {
    return static_cast<double>(raw >> 11) * 0x1p-53 - 0.5;
  }

  std::uint64_t root_seed() const noexcept { return root_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t root_seed_;
  std::uint64_t stream_id_;
};

/// Noise source that always yields xi = 0. Running an MCA backend with it must
/// reproduce round-to-nearest bit for bit.
struct ZeroNoise {
  double next_unit_centered() noexcept { return 0.0; }
  std::uint64_t next_u64() noexcept { return 0; }
};

}  // namespace verif
