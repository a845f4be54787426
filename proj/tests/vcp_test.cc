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

#include <set>

#include <gtest/gtest.h>

#include "decorr/error.h"
#include "decorr/progen.h"
#include "decorr/rng.h"
#include "decorr/serialize.h"

namespace decorr {
namespace {

Program Function(std::size_t size, std::uint64_t seed) {
  GenSpec spec;
  spec.size = size;
  spec.num_inputs = 2;
  spec.num_outputs = 2;
  spec.seed = seed;
  return GenerateProgram(spec);
}

TEST(Vcp, SetupPublishesKeylessBundle) {
  const Program f = ParseProgram(".cells 1\n.out 0\nCONST 0 7");
  const VcpSetup s = VerifierSetup(f, 4, 1, 8);
  EXPECT_EQ(s.published.n, 2u);
  EXPECT_FALSE(s.published.secret.has_value());
  EXPECT_TRUE(s.published.encoding_enabled);
  EXPECT_EQ(BundleToJson(s.published).find("secret"), std::string::npos);
  ASSERT_TRUE(s.vm_image.secret.has_value());
  EXPECT_EQ(s.vm_image.secret->key, s.state.key);
  EXPECT_EQ(s.state.bundle_ref, HashBytes(BundleToJson(s.published)));
  EXPECT_EQ(s.state.challenge.size(), 8u);
  EXPECT_EQ(s.state.expected_outputs_shape, (std::vector<std::size_t>{1, 1}));
  EXPECT_FALSE(s.state.consumed);
}

TEST(Vcp, HonestRunAccepts) {
  const Program f = ParseProgram(".cells 1\n.out 0\nCONST 0 7");
  VcpSetup s = VerifierSetup(f, 4, 2, 8);
  const auto req = MakeRequest(s.state, {});
  const VmAccess vm(s.vm_image);
  const auto resp = Prove(vm, req);
  const Verdict v = Verify(s.state, req, resp);
  EXPECT_TRUE(v.accepted) << v.reason;
  EXPECT_EQ(v.fx, std::vector<Word>{7});
  EXPECT_TRUE(s.state.consumed);
}

TEST(Vcp, HonestRunsAcrossSeeds) {
  SplitMix64 rng(3);
  for (int k = 0; k < 30; ++k) {
    const Program f = Function(4 + rng.Below(40), rng());
    VcpSetup s = VerifierSetup(f, 1 + rng.Below(8), rng(), 8);
    const std::vector<Word> x = {rng(), rng()};
    const auto req = MakeRequest(s.state, x);
    const auto resp = Prove(VmAccess(s.vm_image), req);
    EXPECT_EQ(resp.outputs.size(), 2u);
    const Verdict v = Verify(s.state, req, resp);
    ASSERT_TRUE(v.accepted) << v.reason;
    EXPECT_EQ(v.fx, (*Execute(f, x).outputs)[0]);
  }
}

TEST(Vcp, ProveIsDeterministic) {
  VcpSetup s = VerifierSetup(Function(10, 1), 4, 5, 8);
  const auto req = MakeRequest(s.state, {1, 2});
  const VmAccess vm(s.vm_image);
  const auto a = Prove(vm, req), b = Prove(vm, req);
  EXPECT_EQ(a.digest, b.digest);
  EXPECT_EQ(a.outputs, b.outputs);
}

TEST(Vcp, LazyProverRejected) {
  SplitMix64 rng(9);
  VcpSetup base = VerifierSetup(Function(12, 2), 4, 6, 8);
  const auto req = MakeRequest(base.state, {3, 4});
  for (int k = 0; k < 1000; ++k) {
    VerifierState state = base.state;
    ComputeResponse lazy;
    lazy.digest = rng();
    lazy.outputs = {{rng(), rng()}, {rng()}};
    const Verdict v = Verify(state, req, lazy);
    ASSERT_FALSE(v.accepted);
    EXPECT_EQ(v.reason, "ChallengeMismatch");
  }
}

TEST(Vcp, TamperingProverRejectedAtEveryPosition) {
  VcpSetup base = VerifierSetup(Function(16, 3), 4, 7, 8);
  const auto req = MakeRequest(base.state, {5, 6});
  const VmAccess vm(base.vm_image);
  for (std::size_t t = 0; t < base.published.size(); ++t) {
    const Outcome o = vm.Run({req.x, req.a}, TamperSpec::Delete(t));
    ComputeResponse cheat{o.digest, *o.encoded_outputs, o.steps};
    VerifierState state = base.state;
    EXPECT_FALSE(Verify(state, req, cheat).accepted) << "position " << t;
  }
}

TEST(Vcp, ReplayAndMismatches) {
  VcpSetup s = VerifierSetup(Function(10, 4), 4, 8, 8);
  const auto req = MakeRequest(s.state, {7, 8});
  const auto resp = Prove(VmAccess(s.vm_image), req);
  VerifierState fresh = s.state;
  EXPECT_TRUE(Verify(s.state, req, resp).accepted);
  const Verdict replay = Verify(s.state, req, resp);
  EXPECT_FALSE(replay.accepted);
  EXPECT_EQ(replay.reason, "Replay");

  VerifierState st = fresh;
  ComputeRequest other = req;
  other.a[0] ^= 1;
  EXPECT_EQ(Verify(st, other, resp).reason, "RequestMismatch");

  st = fresh;
  ComputeResponse short_resp = resp;
  short_resp.outputs[1].clear();
  EXPECT_EQ(Verify(st, req, short_resp).reason, "ShapeMismatch");

  st = fresh;
  ComputeResponse flipped = resp;
  flipped.digest ^= 1;
  EXPECT_EQ(Verify(st, req, flipped).reason, "ChallengeMismatch");
}

// Known limitation: only the challenge words are checked, and the encoding is
// a XOR mask, so flipping bits of an f word passes with a wrong f(x).
TEST(Vcp, FunctionWordsAreMalleable) {
  VcpSetup s = VerifierSetup(Function(10, 4), 4, 8, 8);
  const auto req = MakeRequest(s.state, {7, 8});
  auto resp = Prove(VmAccess(s.vm_image), req);
  resp.outputs[kFunctionIndex][0] ^= 1;
  const Verdict v = Verify(s.state, req, resp);
  EXPECT_TRUE(v.accepted);
  EXPECT_EQ(v.fx[0], (*Execute(Function(10, 4), req.x).outputs)[0][0] ^ 1);
}

TEST(Vcp, VerifierDoesLessWork) {
  VcpSetup s = VerifierSetup(Function(40, 5), 4, 9, 8);
  const auto req = MakeRequest(s.state, {1, 1});
  const auto resp = Prove(VmAccess(s.vm_image), req);
  const Verdict v = Verify(s.state, req, resp);
  ASSERT_TRUE(v.accepted);
  EXPECT_EQ(v.verifier_steps, 8u);
  EXPECT_EQ(resp.steps, s.published.size());
  EXPECT_LT(v.verifier_steps, resp.steps);
}

TEST(Vcp, ChallengesDifferAcrossSeeds) {
  const Program f = Function(8, 6);
  std::set<std::string> prints;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    prints.insert(PrintProgram(VerifierSetup(f, 4, seed, 8).state.challenge));
  }
  EXPECT_EQ(prints.size(), 20u);
}

TEST(Vcp, ChallengeOutputIsFullWidth) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = VerifierSetup(Function(8, 6), 4, seed, 8);
    const auto y = *Execute(s.state.challenge, s.state.challenge_input).outputs;
    EXPECT_NE(y[0][0] >> 32, 0u);
  }
}

TEST(Vcp, Errors) {
  const Program f = Function(8, 7);
  EXPECT_THROW(VerifierSetup(f, 4, 1, 0), Error);
  const auto s = VerifierSetup(f, 4, 1, 8);
  try {
    MakeRequest(s.state, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArity);
  }
  try {
    Prove(VmAccess(s.published), MakeRequest(s.state, {1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKeyRequired);
  }
}

}  // namespace
}  // namespace decorr
