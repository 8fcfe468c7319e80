#include "twomode/random.hpp"

#include <array>

namespace twomode {

std::mt19937_64 StreamFactory::stream(std::uint64_t index, std::uint64_t tag) const {
  // seed_seq mixes all words, so neighbouring indices give unrelated states.
  std::array<std::uint32_t, 6> words{
      static_cast<std::uint32_t>(seed_),  static_cast<std::uint32_t>(seed_ >> 32),
      static_cast<std::uint32_t>(index),  static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(tag),    static_cast<std::uint32_t>(tag >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace twomode
