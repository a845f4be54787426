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


#include "decorr/adversary.h"

#include <cmath>

#include <gtest/gtest.h>

#include "decorr/error.h"
#include "decorr/obfuscator.h"
#include "decorr/progen.h"
#include "decorr/rng.h"

namespace decorr {
namespace {

// Four CONST writes; positions 0,1 from program 0 and 2,3 from program 1.
struct Fixture {
  ObfBundle bundle;
  Witness witness;

  Fixture() {
    bundle.addr_space = 4;
    bundle.n = 2;
    bundle.input_map = {{}, {}};
    bundle.output_map = {{0}, {2}};
    for (Addr a = 0; a < 4; ++a) {
      bundle.instructions.push_back(Instruction::Const(a, a + 1));
    }
    witness.origin = {0, 0, 1, 1};
    witness.cell_origin = {0, 0, 1, 1};
  }
};

class FixedAdversary : public Adversary {
 public:
  explicit FixedAdversary(AdversaryPick pick) : pick_(pick) {}
  std::string_view name() const override { return "fixed"; }
  void Prepare(const ObfBundle&, const AuxInput&) override {}
  AdversaryPick Pick(std::uint64_t) const override { return pick_; }

 private:
  AdversaryPick pick_;
};

GameOptions Small() {
  GameOptions options;
  options.min_trials = 1;
  return options;
}

ObfuscationResult MakeBundle(std::size_t n, std::size_t size,
                             std::uint32_t lambda, std::uint64_t seed,
                             bool encode) {
  GenSpec spec;
  spec.size = size;
  spec.num_inputs = 2;
  spec.num_outputs = 2;
  const auto programs = GenerateCorpus(n, spec, seed);
  return Obfuscate(programs, lambda, DeriveSeed(seed, 99), encode);
}

Outputs Inputs(const ObfBundle& b, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Outputs x;
  for (const auto& cells : b.input_map) {
    std::vector<Word> row;
    for (std::size_t k = 0; k < cells.size(); ++k) row.push_back(rng());
    x.push_back(row);
  }
  return x;
}

void ExpectPartition(const GameReport& r) {
  for (const auto& s : r.programs) {
    EXPECT_EQ(s.count_both_s + s.count_both_j + s.count_split, r.trials);
    EXPECT_DOUBLE_EQ(s.est_both_s + s.est_both_j + s.est_split, 1.0);
  }
}

TEST(Baselines, FourPositionFixture) {
  EXPECT_DOUBLE_EQ(PairBaseline(2, 4), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(PairBaseline(1, 4), 0.0);
  EXPECT_DOUBLE_EQ(PairBaseline(4, 4), 1.0);
  EXPECT_DOUBLE_EQ(PairBaseline(8, 16), 56.0 / 240.0);

  Fixture f;
  FixedAdversary same({0, 1});
  const auto r = RunGame(f.bundle, f.witness, same, {}, 10, 1, Small());
  ASSERT_EQ(r.programs.size(), 2u);
  const auto& p0 = r.programs[0];
  EXPECT_EQ(p0.members, 2u);
  EXPECT_DOUBLE_EQ(p0.base_both_s, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(p0.base_both_j, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(p0.base_both_s + p0.base_both_j, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p0.est_both_s, 1.0);
  EXPECT_DOUBLE_EQ(p0.adv_eq2, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(p0.adv_eq3, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.programs[1].est_both_j, 1.0);
  EXPECT_DOUBLE_EQ(r.max_adv_eq2, 5.0 / 6.0);
  ExpectPartition(r);
}

TEST(Baselines, SplitPick) {
  Fixture f;
  FixedAdversary split({1, 2});
  const auto r = RunGame(f.bundle, f.witness, split, {}, 7, 1, Small());
  for (const auto& s : r.programs) {
    EXPECT_EQ(s.count_split, 7u);
    EXPECT_DOUBLE_EQ(s.adv_eq3, 1.0 / 3.0);
  }
  ExpectPartition(r);
}

TEST(Ci95, NormalApproximation) {
  EXPECT_DOUBLE_EQ(Ci95(0.5, 10000), 1.96 * 0.005);
  EXPECT_DOUBLE_EQ(Ci95(0.0, 100), 0.0);
}

TEST(RunGame, FaultedPicksAreReportedAsSplit) {
  Fixture f;
  FixedAdversary same({2, 2});
  auto r = RunGame(f.bundle, f.witness, same, {}, 5, 1, Small());
  EXPECT_EQ(r.faulted, 5u);
  EXPECT_EQ(r.programs[0].count_split, 5u);
  ExpectPartition(r);
  FixedAdversary out_of_range({0, 4});
  r = RunGame(f.bundle, f.witness, out_of_range, {}, 5, 1, Small());
  EXPECT_EQ(r.faulted, 5u);
}

TEST(RunGame, Errors) {
  Fixture f;
  RandomAdversary random;
  const auto expect_code = [](auto fn, ErrorCode code) {
    try {
      fn();
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  Witness short_w = f.witness;
  short_w.origin.pop_back();
  expect_code([&] { RunGame(f.bundle, short_w, random, {}, 10, 1, Small()); },
              ErrorCode::kWitnessMismatch);
  Witness bad_origin = f.witness;
  bad_origin.origin[0] = 5;
  expect_code(
      [&] { RunGame(f.bundle, bad_origin, random, {}, 10, 1, Small()); },
      ErrorCode::kWitnessMismatch);
  expect_code([&] { RunGame(f.bundle, f.witness, random, {}, 999, 1); },
              ErrorCode::kInvalidArgument);
  GameOptions capped = Small();
  capped.aux_cap = 3;
  expect_code(
      [&] {
        RunGame(f.bundle, f.witness, random, AuxInput{"four"}, 10, 1, capped);
      },
      ErrorCode::kInvalidArgument);
  ObfBundle tiny = f.bundle;
  tiny.instructions.resize(1);
  Witness tiny_w{{0}, f.witness.cell_origin};
  expect_code([&] { RunGame(tiny, tiny_w, random, {}, 10, 1, Small()); },
              ErrorCode::kInvalidArgument);
}

TEST(RunGame, WorkerCountDoesNotChangeReport) {
  const auto r = MakeBundle(3, 10, 4, 5, false);
  RandomAdversary random;
  GameOptions one, many;
  many.workers = 7;
  const auto a = RunGame(r.bundle, r.witness, random, {}, 3001, 9, one);
  const auto b = RunGame(r.bundle, r.witness, random, {}, 3001, 9, many);
  ASSERT_EQ(a.programs.size(), b.programs.size());
  for (std::size_t i = 0; i < a.programs.size(); ++i) {
    EXPECT_EQ(a.programs[i].count_both_s, b.programs[i].count_both_s);
    EXPECT_EQ(a.programs[i].count_both_j, b.programs[i].count_both_j);
  }
  EXPECT_EQ(a.max_adv_eq2, b.max_adv_eq2);
}

TEST(RandomAdversary, DistinctAndUniform) {
  const auto r = MakeBundle(2, 6, 2, 1, false);
  RandomAdversary random;
  random.Prepare(r.bundle, {});
  const std::size_t length = r.bundle.size();
  std::vector<double> hits(length, 0);
  constexpr int kDraws = 10000;
  for (int d = 0; d < kDraws; ++d) {
    const auto p = random.Pick(DeriveSeed(4, d));
    ASSERT_NE(p.pos1, p.pos2);
    ASSERT_LT(p.pos1, length);
    ASSERT_LT(p.pos2, length);
    ++hits[p.pos1];
  }
  double chi = 0;
  const double expected = static_cast<double>(kDraws) / length;
  for (double h : hits) chi += (h - expected) * (h - expected) / expected;
  // 99.9% quantile of chi-square with 15 degrees of freedom.
  ASSERT_EQ(length, 16u);
  EXPECT_LT(chi, 37.697);
  EXPECT_EQ(AdversaryRandomPick(r.bundle, {}, 8), random.Pick(8));
}

TEST(RandomAdversary, AdvantageWithinNoise) {
  const auto r = MakeBundle(3, 12, 4, 2, false);
  RandomAdversary random;
  const auto report = RunGame(r.bundle, r.witness, random, {}, 10000, 3);
  for (const auto& s : report.programs) {
    EXPECT_LE(s.adv_eq2, 3 * s.ci95_both_s);
  }
  ExpectPartition(report);
}

TEST(OracleAdversary, ReachesUpperBound) {
  const auto r = MakeBundle(3, 8, 4, 3, false);
  for (std::uint32_t target = 0; target < 3; ++target) {
    OracleAdversary oracle(r.witness, target);
    const auto report = RunGame(r.bundle, r.witness, oracle, {}, 1000, 1);
    const auto& s = report.programs[target];
    EXPECT_DOUBLE_EQ(s.est_both_s, 1.0);
    EXPECT_DOUBLE_EQ(s.adv_eq2, 1.0 - s.base_both_s);
    for (const auto& other : report.programs) {
      EXPECT_LE(other.est_both_s, 1.0);
    }
  }
}

TEST(Games, TwoProgramsShareEvents) {
  const auto r = MakeBundle(2, 10, 4, 8, false);
  for (const char* name : {"random", "syntactic", "dataflow"}) {
    auto adversary = MakeAdversary(name, nullptr, nullptr, nullptr);
    const auto report = RunGame(r.bundle, r.witness, *adversary, {}, 2000, 4);
    EXPECT_EQ(report.programs[0].count_both_j,
              report.programs[1].count_both_s);
    EXPECT_EQ(report.programs[1].count_both_j,
              report.programs[0].count_both_s);
    ExpectPartition(report);
  }
}

TEST(SyntacticAdversary, SingleOpcodeStreamActsRandom) {
  Fixture f;
  SyntacticAdversary syntactic;
  syntactic.Prepare(f.bundle, {});
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = syntactic.Pick(s);
    EXPECT_NE(p.pos1, p.pos2);
  }
  const auto report = RunGame(f.bundle, f.witness, syntactic, {}, 6000, 2);
  for (const auto& s : report.programs) {
    EXPECT_LE(s.adv_eq2, 3 * s.ci95_both_s + 1e-12);
  }
}

TEST(SyntacticAdversary, SeparatesDisjointOpcodesInNaiveMerge) {
  GenSpec adds;
  adds.size = 12;
  adds.num_inputs = 2;
  adds.opcode_weights = {0, 0, 1, 0, 0, 0};
  adds.seed = 1;
  GenSpec xors = adds;
  xors.size = 8;
  xors.opcode_weights = {0, 0, 0, 0, 0, 1};
  const std::vector<Program> programs = {GenerateProgram(adds),
                                         GenerateProgram(xors)};
  const auto r = ConcatenateNaive(programs);
  SyntacticAdversary syntactic;
  const auto report = RunGame(r.bundle, r.witness, syntactic, {}, 1000, 3);
  const auto& s = report.programs[0];
  EXPECT_DOUBLE_EQ(s.est_both_s, 1.0);
  EXPECT_NEAR(report.max_adv_eq2, 1.0 - s.base_both_s, 1e-12);
  EXPECT_EQ(AdversarySyntacticPick(r.bundle, {}, 5), syntactic.Pick(5));
}

TEST(DataflowAdversary, SingleProgramPicksStayInside) {
  const auto r = MakeBundle(1, 16, 4, 11, false);
  DataflowAdversary dataflow;
  const auto report = RunGame(r.bundle, r.witness, dataflow, {}, 1000, 1);
  EXPECT_DOUBLE_EQ(report.programs[0].est_both_s, 1.0);
  EXPECT_FALSE(dataflow.focus_edges().empty());
  for (const auto& e : dataflow.focus_edges()) {
    EXPECT_LT(e.pos1, e.pos2);
    const auto& w = r.bundle.instructions[e.pos1].dst;
    const auto& reader = r.bundle.instructions[e.pos2];
    EXPECT_TRUE(static_cast<Addr>(reader.a) == w || reader.b == w);
  }
}

TEST(DataflowAdversary, LeaksOriginUnderObfuscation) {
  const auto r = MakeBundle(2, 32, 8, 12, false);
  DataflowAdversary dataflow;
  const auto report = RunGame(r.bundle, r.witness, dataflow, {}, 1000, 2);
  EXPECT_GE(report.max_adv_eq2, 0.5);
  EXPECT_EQ(AdversaryDataflowPick(r.bundle, {}, 3), dataflow.Pick(3));
}

TEST(DataflowAdversary, FallsBackWithoutEdges) {
  Fixture f;
  DataflowAdversary dataflow;
  dataflow.Prepare(f.bundle, {});
  EXPECT_TRUE(dataflow.focus_edges().empty());
  const auto p = dataflow.Pick(1);
  EXPECT_NE(p.pos1, p.pos2);
}

TEST(TamperAdversary, PlainOutputsSeparatePrograms) {
  const auto r = MakeBundle(2, 32, 8, 21, false);
  const VmAccess vm(r.bundle);
  const auto x = Inputs(r.bundle, 1);
  TamperAdversary tamper(vm, x);
  const auto report = RunGame(StripSecrets(r.bundle), r.witness, tamper, {},
                              1000, 3);
  EXPECT_FALSE(tamper.fell_back());
  EXPECT_GE(report.max_adv_eq2, 0.5);
  // One baseline run plus one run per deleted position.
  EXPECT_EQ(vm.executions(), r.bundle.size() + 1);
  // Every non-empty signature only touches one program's outputs.
  for (const auto& [signature, positions] : tamper.clusters()) {
    bool first = false, second = false;
    for (std::size_t k = 0; k < signature.size(); ++k) {
      if (!signature[k]) continue;
      (k < r.bundle.output_map[0].size() ? first : second) = true;
    }
    EXPECT_FALSE(first && second);
    if (!first && !second) continue;
    for (auto t : positions) {
      EXPECT_EQ(r.witness.origin[t], first ? 0u : 1u);
    }
  }
}

TEST(TamperAdversary, EncodedOutputsDefeatIt) {
  const auto r = MakeBundle(2, 32, 8, 21, true);
  const VmAccess vm(r.bundle);
  const auto x = Inputs(r.bundle, 1);
  TamperAdversary tamper(vm, x);
  const auto report = RunGame(StripSecrets(r.bundle), r.witness, tamper, {},
                              1000, 3);
  EXPECT_TRUE(tamper.fell_back());
  EXPECT_EQ(tamper.clusters().size(), 1u);
  EXPECT_LE(report.max_adv_eq2, 0.05);
}

TEST(TamperAdversary, OneShotMatchesPrepared) {
  const auto r = MakeBundle(2, 10, 2, 6, false);
  const VmAccess vm(r.bundle);
  const auto x = Inputs(r.bundle, 2);
  TamperAdversary tamper(vm, x);
  tamper.Prepare(vm.view(), {});
  EXPECT_EQ(AdversaryTamperPick(vm.view(), {}, 4, vm, x), tamper.Pick(4));
}

TEST(MakeAdversary, Validation) {
  EXPECT_EQ(MakeAdversary("random", nullptr, nullptr, nullptr)->name(),
            "random");
  EXPECT_THROW(MakeAdversary("tamper", nullptr, nullptr, nullptr), Error);
  EXPECT_THROW(MakeAdversary("oracle", nullptr, nullptr, nullptr), Error);
  EXPECT_THROW(MakeAdversary("psychic", nullptr, nullptr, nullptr), Error);
}

}  // namespace
}  // namespace decorr
