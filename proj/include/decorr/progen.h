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

#ifndef DECORR_PROGEN_H_
#define DECORR_PROGEN_H_

#include <array>
#include <cstdint>
#include <vector>

#include "decorr/isa.h"

namespace decorr {

struct GenSpec {
  std::size_t size = 16;
  std::size_t num_inputs = 1;
  std::size_t num_outputs = 1;
  // Indexed by Opcode.
  std::array<double, kNumOpcodes> opcode_weights = {1, 1, 1, 1, 1, 1};
  std::uint64_t seed = 0;
};

// Straight-line program of exactly spec.size instructions. Sources are always
// input cells or cells written earlier, and the last num_outputs
// instructions write the (distinct, fresh) output cells.
Program GenerateProgram(const GenSpec& spec);

// n programs named p0..p{n-1}; program k uses DeriveSeed(seed, k).
std::vector<Program> GenerateCorpus(std::size_t n, const GenSpec& spec,
                                    std::uint64_t seed);

}  // namespace decorr

#endif  // DECORR_PROGEN_H_
