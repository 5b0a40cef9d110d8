// include/stab/base.h

// Copyright 2026  The stab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef STAB_BASE_H_
#define STAB_BASE_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stab {

inline constexpr std::string_view kToolVersion = "0.3.1";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TokenId = std::uint32_t;
using Digest = std::uint64_t;

// 64-bit FNV-1a over an explicit little-endian byte layout. Used for cache
// keys and report digests.
class Hasher {
 public:
  Hasher& Bytes(const void* data, std::size_t n);
  Hasher& Str(std::string_view s);
  Hasher& U64(std::uint64_t v);
  Hasher& F64(double v);
  Digest digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string HexDigest(Digest d);

// mt19937_64 with explicit uniform and Box-Muller gaussian transforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform();  // [0, 1)
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  std::uint64_t UniformInt(std::uint64_t n);  // [0, n)
  double Gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stab

#endif  // STAB_BASE_H_
