#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tskd {

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t value) noexcept {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

/// Deterministic seed for a (root, k1, k2, ...) key path.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix_seed(root);
  for (std::uint64_t p : path) s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return s;
}

/// mt19937_64 output is fixed by the standard; distributions are not, so callers reduce raw
/// draws themselves to stay reproducible across standard libraries.
using Engine = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = Engine::max() - (Engine::max() % bound);
  std::uint64_t draw = engine();
  while (draw >= limit) draw = engine();
  return draw % bound;
}

/// Uniform real in [lo, hi) from the top 53 bits of one draw.
inline double uniform_real(Engine& engine, double lo, double hi) {
  const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

}  // namespace tskd
