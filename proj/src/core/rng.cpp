#include "core/rng.hpp"

#include <cassert>
#include <limits>

namespace codepoison {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, StreamDomain domain,
                                 std::uint64_t ordinal) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(domain));
  return splitmix64(h ^ ordinal);
}

std::string_view stream_derivation_description() noexcept {
  return "mt19937_64 seeded with splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ ordinal); "
         "domains: selection=0x5e1ec7, train=0x7a1, test=0x7e57; "
         "uniform_index(n) = x % n for the first raw output x >= (2^64 - n) % n";
}

std::size_t RngStream::uniform_index(std::size_t n) {
  assert(n > 0);
  ++draws_;
  const auto bound = static_cast<std::uint64_t>(n);
  // Reject the low residue class so that x % bound is exactly uniform.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

}  // namespace codepoison
