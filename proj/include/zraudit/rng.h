// Copyright 2026 The zraudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZRAUDIT_RNG_H_
#define ZRAUDIT_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace zraudit {

// SplitMix64 finalizer. Used to derive independent sub-stream seeds.
uint64_t Mix64(uint64_t x);

// Derives a child seed from a parent seed and an integer index.
uint64_t DeriveSeed(uint64_t parent, uint64_t index);

// Derives a child seed from a parent seed and a fixed stream label.
uint64_t DeriveSeed(uint64_t parent, std::string_view label);

// Seeded generator with platform-independent uniform and normal draws.
// The standard library distributions are implementation-defined, so the
// transforms live here to keep outputs bit-stable across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(Mix64(seed)) {}

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform();

  // Standard normal via Box-Muller.
  double Normal();

  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);

  bool Bernoulli(double prob) { return Uniform() < prob; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace zraudit

#endif  // ZRAUDIT_RNG_H_
