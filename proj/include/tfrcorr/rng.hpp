#pragma once

#include <cstdint>
#include <random>

namespace tfrcorr {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `master`. Streams are addressed by
/// counter, so any worker can construct any stream without coordination.
inline constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_stream(std::uint64_t master, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream_seed(master, stream)),
                    static_cast<std::uint32_t>(stream_seed(master, stream) >> 32)};
  return Engine(seq);
}

}  // namespace tfrcorr
