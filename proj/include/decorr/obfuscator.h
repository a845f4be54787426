//
// Copyright 2026 The decorr Authors
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

// Multi-program merge: every program hides among the instructions of the
// others. The pipeline per program is
//
//   1. canonicalize to 3-address form (MOV d a  ->  ADD d a zero),
//   2. pad with scratch-only CONST/XOR writes toward a common length,
//   3. relocate its cells, padding scratch and zero cell through one
//      seed-derived permutation of [0, A),
//
// after which the n chains are merged by a uniformly random order-preserving
// interleaving. The Witness records where every instruction came from.

#ifndef DECORR_OBFUSCATOR_H_
#define DECORR_OBFUSCATOR_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "decorr/bundle.h"
#include "decorr/isa.h"

namespace decorr {

inline constexpr std::uint64_t kMaxAddrSpace = std::uint64_t{1} << 20;

struct ObfuscationResult {
  ObfBundle bundle;
  Witness witness;
};

ObfuscationResult Obfuscate(std::span<const Program> programs,
                            std::uint32_t lambda, std::uint64_t seed,
                            bool encode);

// Padded chain length per program. All programs share
// L = ceil((max|p| + 1) / lambda) * lambda when n * L fits in
// sum|p| + n * lambda; otherwise lengths are levelled toward a common value
// inside that budget. Every program receives at least one padding write.
std::vector<std::size_t> PaddedLengths(std::span<const std::size_t> sizes,
                                       std::uint32_t lambda);

// Uniformly random merge of chains with the given lengths that keeps each
// chain's internal order. Returns the chain index per merged position.
std::vector<std::uint32_t> InterleavePositions(
    std::span<const std::size_t> sizes, std::uint64_t seed);

// Drops the secret section. Idempotent.
ObfBundle StripSecrets(const ObfBundle& bundle);

// Baseline merge with no padding, relocation or interleaving: programs are
// laid end to end with disjoint, contiguous cell ranges. Only useful to show
// what the obfuscator removes.
ObfuscationResult ConcatenateNaive(std::span<const Program> programs);

}  // namespace decorr

#endif  // DECORR_OBFUSCATOR_H_
