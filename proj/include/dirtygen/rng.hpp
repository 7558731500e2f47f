// Copyright 2026 The dirtygen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Addressed pseudorandom streams.
//
// Every random decision in a run is taken from a stream addressed by
// (seed, stage, tuple index, attribute). The address is folded into a 64-bit
// key with a fixed, platform-independent derivation:
//
//   k0 = mix64(seed)
//   k1 = mix64(k0 ^ fnv1a64(stage))
//   k2 = mix64(k1 ^ tuple_index)
//   k  = mix64(k2 ^ fnv1a64(attribute))
//
// where mix64 is the SplitMix64 finalizer and fnv1a64 the 64-bit FNV-1a hash
// of the UTF-8 bytes. The key seeds a xoshiro256** generator through
// SplitMix64. Because streams depend only on their address, the value drawn
// for tuple i never depends on how many other tuples or error specs exist.

#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace dirtygen {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

// `h` continues a previous hash, so data can be hashed in chunks.
constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::string_view stage,
                                   std::uint64_t tuple_index, std::string_view attribute) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ fnv1a64(stage));
  k = mix64(k ^ tuple_index);
  return mix64(k ^ fnv1a64(attribute));
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t key) {
    std::uint64_t sm = key;
    for (auto& s : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      s = mix64(sm);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [0, n); n must be positive. Lemire's multiply-shift with
  // rejection, so the result is unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(next_u64());
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + uniform_index(span + 1));
  }

  bool coin() { return (next_u64() >> 63) != 0; }

  // Marsaglia polar method; the second variate is discarded.
  double normal(double mean, double stddev) {
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return mean + stddev * u * std::sqrt(-2.0 * std::log(s) / s);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
};

inline RngStream derive_stream(std::uint64_t seed, std::string_view stage,
                               std::uint64_t tuple_index, std::string_view attribute) {
  return RngStream(stream_key(seed, stage, tuple_index, attribute));
}

// Keyed bijection on [0, size): a balanced Feistel network over the smallest
// even bit width covering `size`, with cycle walking back into range.
// forward(i) for i = 0, 1, 2, ... enumerates the domain without repetition,
// which gives draws without replacement in O(1) memory.
class IndexPermutation {
 public:
  IndexPermutation() = default;
  IndexPermutation(std::uint64_t size, std::uint64_t key) : size_(size), key_(key) {
    unsigned bits = size <= 1 ? 2u : static_cast<unsigned>(std::bit_width(size - 1));
    if (bits < 2) bits = 2;
    if (bits % 2) ++bits;
    half_bits_ = bits / 2;
    mask_ = half_bits_ >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << half_bits_) - 1);
  }

  std::uint64_t size() const { return size_; }

  std::uint64_t forward(std::uint64_t i) const {
    std::uint64_t x = encrypt(i);
    while (x >= size_) x = encrypt(x);
    return x;
  }

  std::uint64_t inverse(std::uint64_t j) const {
    std::uint64_t x = decrypt(j);
    while (x >= size_) x = decrypt(x);
    return x;
  }

 private:
  static constexpr int kRounds = 4;

  std::uint64_t round_fn(int round, std::uint64_t half) const {
    return mix64(key_ ^ mix64(half + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(round + 1))) &
           mask_;
  }

  std::uint64_t encrypt(std::uint64_t x) const {
    std::uint64_t left = (x >> half_bits_) & mask_;
    std::uint64_t right = x & mask_;
    for (int r = 0; r < kRounds; ++r) {
      std::uint64_t next = left ^ round_fn(r, right);
      left = right;
      right = next;
    }
    return (left << half_bits_) | right;
  }

  std::uint64_t decrypt(std::uint64_t x) const {
    std::uint64_t left = (x >> half_bits_) & mask_;
    std::uint64_t right = x & mask_;
    for (int r = kRounds - 1; r >= 0; --r) {
      std::uint64_t prev = right ^ round_fn(r, left);
      right = left;
      left = prev;
    }
    return (left << half_bits_) | right;
  }

  std::uint64_t size_ = 0;
  std::uint64_t key_ = 0;
  unsigned half_bits_ = 1;
  std::uint64_t mask_ = 1;
};

}  // namespace dirtygen
