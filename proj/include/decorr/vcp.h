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

// Verifiable computation with a hidden challenge program.
//
// The verifier merges the user's program f with a small random program c,
// publishes the bundle without its key, and asks the prover for f(x) and
// c(a). Only the verifier can decode the answer; it recomputes c(a) itself
// and accepts f(x) iff the decoded challenge words match. Bundle program 0
// is f and program 1 is c.

#ifndef DECORR_VCP_H_
#define DECORR_VCP_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decorr/bundle.h"
#include "decorr/isa.h"
#include "decorr/vm.h"

namespace decorr {

inline constexpr std::size_t kFunctionIndex = 0;
inline constexpr std::size_t kChallengeIndex = 1;

struct VerifierState {
  Program challenge;
  std::vector<Word> challenge_input;
  Word key = 0;
  // HashBytes of the published bundle's serialized form.
  Word bundle_ref = 0;
  std::size_t function_inputs = 0;
  std::vector<std::size_t> expected_outputs_shape;
  bool consumed = false;

  bool operator==(const VerifierState&) const = default;
};

struct ComputeRequest {
  std::vector<Word> x;
  std::vector<Word> a;

  bool operator==(const ComputeRequest&) const = default;
};

struct ComputeResponse {
  Word digest = 0;
  // Encoded outputs, one list per bundle program.
  Outputs outputs;
  // Prover-side step count; not part of the wire format.
  std::uint64_t steps = 0;
};

struct VcpSetup {
  // What the prover is shown: no key.
  ObfBundle published;
  // The provisioned image loaded into the prover's sealed VM.
  ObfBundle vm_image;
  VerifierState state;
};

struct Verdict {
  bool accepted = false;
  // ChallengeMismatch, ShapeMismatch, RequestMismatch or Replay.
  std::string reason;
  std::vector<Word> fx;
  std::uint64_t verifier_steps = 0;
};

VcpSetup VerifierSetup(const Program& f, std::uint32_t lambda,
                       std::uint64_t seed, std::size_t challenge_size);

ComputeRequest MakeRequest(const VerifierState& state, std::vector<Word> x);

ComputeResponse Prove(const VmAccess& vm, const ComputeRequest& request);

// Single use: a second call on the same state rejects with Replay.
Verdict Verify(VerifierState& state, const ComputeRequest& request,
               const ComputeResponse& response);

}  // namespace decorr

#endif  // DECORR_VCP_H_
