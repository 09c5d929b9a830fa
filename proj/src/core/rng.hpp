#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace codepoison {

/// Separates the per-sample streams of the training set, the evaluation set and
/// the victim selection so that the same ordinal never shares a stream.
enum class StreamDomain : std::uint64_t {
  Selection = 0x5e1ec7,
  Train = 0x7a1,
  Test = 0x7e57,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ ordinal)
std::uint64_t derive_stream_seed(std::uint64_t seed, StreamDomain domain,
                                 std::uint64_t ordinal) noexcept;

/// Human-readable description of the derivation above, echoed in manifests so
/// draws can be re-derived by other tools.
std::string_view stream_derivation_description() noexcept;

/// A seeded source of draws. Every call to uniform_index() is one logical
/// draw, independent of how many raw engine outputs rejection consumes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream derived(std::uint64_t seed, StreamDomain domain, std::uint64_t ordinal) {
    return RngStream(derive_stream_seed(seed, domain, ordinal));
  }

  /// Uniform over [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  std::size_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::size_t draws_ = 0;
};

}  // namespace codepoison
