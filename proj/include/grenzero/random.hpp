#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace grenzero {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128
/// random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// 32-bit FNV-1a; used to fold experiment tags into stream coordinates.
std::uint32_t fnv1a32(std::string_view text);

/// Coordinates of one independent random stream. Two streams with
/// different coordinates never share a Philox block.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t tag = 0;
  std::uint32_t cell = 0;
  std::uint32_t replicate = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Counter-based random stream. The output sequence is a pure function of
/// the StreamId, so replicates can be evaluated in any order or thread.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  explicit RandomStream(StreamId id = {});
  RandomStream(std::uint64_t seed, std::uint32_t tag, std::uint32_t cell,
               std::uint32_t replicate)
      : RandomStream(StreamId{seed, tag, cell, replicate}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Unit-rate exponential variate; strictly positive.
  double exponential();
  double normal();
  /// Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; for shape < 1 a
  /// Gamma(shape + 1) draw is multiplied by U^(1/shape).
  double gamma(double shape);

  const StreamId& id() const { return id_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint32_t blocks_used() const { return block_; }

 private:
  void refill();

  StreamId id_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int position_ = 4;
};

}  // namespace grenzero
