#pragma once

#include <cstdint>
#include <random>

namespace twomode {

/// Derives independent, reproducible random streams from one master seed.
///
/// Stream `(index, tag)` is a function of the master seed and the pair only,
/// so sample i sees the same numbers no matter which thread draws it or in
/// which order samples are processed. `tag` separates unrelated uses of the
/// same index (state amplitudes vs. fringe phases, for instance).
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t master_seed) : seed_(master_seed) {}

  std::uint64_t seed() const { return seed_; }

  std::mt19937_64 stream(std::uint64_t index, std::uint64_t tag = 0) const;

 private:
  std::uint64_t seed_;
};

namespace stream_tag {
inline constexpr std::uint64_t state = 0;
inline constexpr std::uint64_t phase = 1;
inline constexpr std::uint64_t rotation = 2;
}  // namespace stream_tag

}  // namespace twomode
