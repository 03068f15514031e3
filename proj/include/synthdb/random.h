// Copyright 2026 The synthdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random streams. One root seed fans out into independent streams
// keyed by (component name, index), so adding or reordering components never
// shifts the draws another component sees.

#ifndef SYNTHDB_RANDOM_H_
#define SYNTHDB_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace synthdb {

namespace internal {

inline constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a; stable across platforms, unlike std::hash.
inline constexpr std::uint64_t HashKey(std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace internal

// A single deterministic random stream. Distribution code is written out
// here instead of using <random> distributions, whose output is
// implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextBits() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in the open interval (0, 1).
  double UniformOpen() {
    double u;
    do {
      u = Uniform();
    } while (u == 0.0);
    return u;
  }

  // Uniform integer in [0, bound).
  std::uint64_t UniformIndex(std::uint64_t bound) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t limit = bound == 0 ? 0 : (~bound + 1) % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; the second variate is cached.
  double Gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = UniformOpen();
    const double u2 = Uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Root of the stream tree; cheap to copy.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t root_seed) : root_(root_seed) {}

  std::uint64_t root_seed() const { return root_; }

  RandomStream Stream(std::string_view component, std::uint64_t index = 0) const {
    std::uint64_t s = internal::SplitMix64(root_ ^ internal::HashKey(component));
    s = internal::SplitMix64(s + index);
    return RandomStream(s);
  }

  // A child factory, e.g. one per experiment cell.
  StreamFactory Child(std::string_view component, std::uint64_t index = 0) const {
    return StreamFactory(Stream(component, index).NextBits());
  }

 private:
  std::uint64_t root_;
};

}  // namespace synthdb

#endif  // SYNTHDB_RANDOM_H_
