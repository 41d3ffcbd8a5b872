// Copyright 2026 The qemit Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace qemit {

/// Engine used for every random draw. The name is written into output
/// metadata so results can be tied to a generator version.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64/v1";

/// Uniform double in [0, 1) from the top 53 bits. Unlike
/// std::uniform_real_distribution, the mapping is fixed across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream `index` derived from a base seed.
inline Rng make_stream(uint64_t seed, uint64_t index) { return Rng(splitmix64(seed ^ splitmix64(index))); }

}  // namespace qemit
