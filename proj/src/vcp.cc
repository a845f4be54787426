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

#include "decorr/vcp.h"

#include "decorr/obfuscator.h"
#include "decorr/progen.h"
#include "decorr/rng.h"
#include "decorr/serialize.h"

namespace decorr {
namespace {

constexpr std::size_t kChallengeInputs = 2;
constexpr int kChallengeAttempts = 256;

// A usable challenge has a full-width output that reacts to every input word,
// so a response computed for some other `a` cannot pass.
bool IsLiveChallenge(const Program& c, const std::vector<Word>& a) {
  const auto base = *Execute(c, a).outputs;
  if (base[0][0] >> 32 == 0) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    auto perturbed = a;
    perturbed[k] ^= 0x5A5A5A5A5A5A5A5BULL;
    if (*Execute(c, perturbed).outputs == base) return false;
  }
  return true;
}

}  // namespace

VcpSetup VerifierSetup(const Program& f, std::uint32_t lambda,
                       std::uint64_t seed, std::size_t challenge_size) {
  RequireValid(f);
  if (challenge_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "challenge size must be >= 1");
  }
  SplitMix64 rng(DeriveSeed(seed, 0xC0FFEE));

  Program challenge;
  std::vector<Word> a;
  bool found = false;
  for (int attempt = 0; attempt < kChallengeAttempts && !found; ++attempt) {
    GenSpec spec;
    spec.size = challenge_size;
    spec.num_inputs = kChallengeInputs;
    spec.num_outputs = 1;
    spec.seed = rng();
    challenge = GenerateProgram(spec);
    challenge.name = "c";
    a = {rng(), rng()};
    found = IsLiveChallenge(challenge, a);
  }
  if (!found) {
    throw Error(ErrorCode::kSpec, "could not draw a live challenge program");
  }

  const Program programs[] = {f, challenge};
  auto obfuscated = Obfuscate(programs, lambda, rng(), /*encode=*/true);

  VcpSetup setup;
  setup.vm_image = std::move(obfuscated.bundle);
  setup.published = StripSecrets(setup.vm_image);
  setup.state.challenge = std::move(challenge);
  setup.state.challenge_input = std::move(a);
  setup.state.key = setup.vm_image.secret->key;
  setup.state.bundle_ref = HashBytes(BundleToJson(setup.published));
  setup.state.function_inputs = f.input_cells.size();
  setup.state.expected_outputs_shape = {f.output_cells.size(),
                                        setup.state.challenge.output_cells.size()};
  return setup;
}

ComputeRequest MakeRequest(const VerifierState& state, std::vector<Word> x) {
  if (x.size() != state.function_inputs) {
    throw Error(ErrorCode::kArity,
                "f expects " + std::to_string(state.function_inputs) +
                    " inputs, got " + std::to_string(x.size()));
  }
  return {std::move(x), state.challenge_input};
}

ComputeResponse Prove(const VmAccess& vm, const ComputeRequest& request) {
  const Outcome outcome = vm.Run(Outputs{request.x, request.a});
  ComputeResponse response;
  response.digest = outcome.digest;
  response.outputs = outcome.encoded_outputs ? *outcome.encoded_outputs
                                             : outcome.outputs.value_or(Outputs{});
  response.steps = outcome.steps;
  return response;
}

Verdict Verify(VerifierState& state, const ComputeRequest& request,
               const ComputeResponse& response) {
  Verdict verdict;
  if (state.consumed) {
    verdict.reason = "Replay";
    return verdict;
  }
  state.consumed = true;

  if (request.a != state.challenge_input ||
      request.x.size() != state.function_inputs) {
    verdict.reason = "RequestMismatch";
    return verdict;
  }
  const auto& shape = state.expected_outputs_shape;
  bool shape_ok = response.outputs.size() == shape.size();
  for (std::size_t i = 0; shape_ok && i < shape.size(); ++i) {
    shape_ok = response.outputs[i].size() == shape[i];
  }
  if (!shape_ok) {
    verdict.reason = "ShapeMismatch";
    return verdict;
  }

  const Outputs decoded =
      DecodeOutputs(response.outputs, response.digest, state.key);
  const Outcome local = Execute(state.challenge, request.a);
  verdict.verifier_steps = local.steps;
  if (decoded[kChallengeIndex] != (*local.outputs)[0]) {
    verdict.reason = "ChallengeMismatch";
    return verdict;
  }
  verdict.accepted = true;
  verdict.fx = decoded[kFunctionIndex];
  return verdict;
}

}  // namespace decorr
