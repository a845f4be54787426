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

#ifndef DECORR_BUNDLE_H_
#define DECORR_BUNDLE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "decorr/isa.h"

namespace decorr {

struct SecretSection {
  Word key = 0;

  bool operator==(const SecretSection&) const = default;
};

// Recorded size bound: |stream| <= c1 * sum|p_i| + c2 * n * lambda.
struct SizeBound {
  std::uint64_t c1 = 1;
  std::uint64_t c2 = 1;

  bool operator==(const SizeBound&) const = default;
};

// The merged obfuscated artifact. A bundle with `secret` unset is the
// adversary's (and prover's) view.
struct ObfBundle {
  std::vector<Instruction> instructions;
  Addr addr_space = 0;
  std::vector<std::vector<Addr>> input_map;
  std::vector<std::vector<Addr>> output_map;
  std::uint32_t lambda = 1;
  std::uint32_t n = 0;
  bool encoding_enabled = false;
  Word digest_seed = 0;
  SizeBound size_bound;
  std::optional<SecretSection> secret;

  std::size_t size() const { return instructions.size(); }

  bool operator==(const ObfBundle&) const = default;
};

inline constexpr std::int32_t kScratchOrigin = -1;

// Ground truth for scoring games. Never shown to adversaries.
struct Witness {
  // Source program index per stream position.
  std::vector<std::uint32_t> origin;
  // Owning program per cell in [0, addrSpace), or kScratchOrigin for slack.
  std::vector<std::int32_t> cell_origin;

  bool operator==(const Witness&) const = default;
};

// Per-program instruction counts m_i.
std::vector<std::size_t> OriginCounts(const Witness& witness, std::uint32_t n);

}  // namespace decorr

#endif  // DECORR_BUNDLE_H_
