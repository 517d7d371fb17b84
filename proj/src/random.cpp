#include "grenzero/random.hpp"

#include <cmath>

#include "grenzero/errors.hpp"

namespace grenzero {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint32_t fnv1a32(std::string_view text) {
  std::uint32_t hash = 0x811C9DC5u;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x01000193u;
  }
  return hash;
}

RandomStream::RandomStream(StreamId id) : id_(id) {}

void RandomStream::refill() {
  // Counter layout: (block, replicate, cell, tag); key: the 64-bit seed.
  const std::array<std::uint32_t, 4> counter{block_, id_.replicate, id_.cell,
                                             id_.tag};
  const std::array<std::uint32_t, 2> key{
      static_cast<std::uint32_t>(id_.seed),
      static_cast<std::uint32_t>(id_.seed >> 32)};
  if (block_ == std::numeric_limits<std::uint32_t>::max()) {
    throw ConvergenceError("random stream exhausted (2^32 blocks)");
  }
  buffer_ = philox4x32(counter, key);
  ++block_;
  position_ = 0;
}

RandomStream::result_type RandomStream::operator()() {
  if (position_ == 4) refill();
  return buffer_[position_++];
}

double RandomStream::uniform() {
  const std::uint64_t hi = (*this)() >> 5;  // 27 bits
  const std::uint64_t lo = (*this)() >> 6;  // 26 bits
  const std::uint64_t bits = (hi << 26) | lo;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RandomStream::gamma(double shape) {
  detail::require(shape > 0.0 && std::isfinite(shape),
                  "gamma shape must be positive and finite");
  if (shape < 1.0) {
    const double boost = std::pow(uniform(), 1.0 / shape);
    return gamma(shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace grenzero
