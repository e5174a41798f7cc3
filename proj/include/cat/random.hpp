// Copyright 2026 The CAT Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace cat {

using Rng = std::mt19937_64;

/// Named RNG streams. A master seed plus a stream and an index yields an
/// independent seed, so repetitions can run in any order.
enum class Stream : std::uint64_t {
  kSplit = 1,
  kInit = 2,
  kDropout = 3,
  kCluster = 4,
  kFinetune = 5,
  kRetrain = 6,
  kTreatment = 7,
  kSynthetic = 8,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0) {
  return mix64(mix64(master ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace cat
