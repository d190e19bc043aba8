#include "satorder/rng.hpp"

#include <limits>

namespace satorder {

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  // 2^64 mod bound values at the top of the range would bias the result.
  const std::uint64_t excess = (max % bound + 1) % bound;
  const std::uint64_t limit = max - excess;
  for (;;) {
    std::uint64_t x = next();
    if (x <= limit) return x % bound;
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace satorder
