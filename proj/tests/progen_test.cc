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


#include "decorr/progen.h"

#include <iostream>
#include <set>

#include <gtest/gtest.h>

#include "decorr/error.h"
#include "decorr/rng.h"
#include "decorr/vm.h"

namespace decorr {
namespace {

ErrorCode CodeOf(const GenSpec& spec) {
  try {
    GenerateProgram(spec);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kSyntax;
}

// True if flipping some single input word changes the outputs.
bool IsLive(const Program& p, SplitMix64& rng) {
  std::vector<Word> x(p.input_cells.size());
  for (auto& w : x) w = rng();
  const auto base = *Execute(p, x).outputs;
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto y = x;
    y[k] = rng();
    if (*Execute(p, y).outputs != base) return true;
  }
  return false;
}

TEST(Generate, SingleForcedConst) {
  GenSpec spec;
  spec.size = 1;
  spec.num_inputs = 0;
  spec.num_outputs = 1;
  spec.seed = 4;
  const Program p = GenerateProgram(spec);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.instructions[0].op, Opcode::kConst);
  EXPECT_EQ(p.output_cells, std::vector<Addr>{p.instructions[0].dst});
}

TEST(Generate, DeterministicPerSeed) {
  GenSpec spec;
  spec.size = 40;
  spec.num_inputs = 3;
  spec.num_outputs = 2;
  spec.seed = 123;
  EXPECT_EQ(PrintProgram(GenerateProgram(spec)),
            PrintProgram(GenerateProgram(spec)));
  GenSpec other = spec;
  other.seed = 124;
  EXPECT_NE(PrintProgram(GenerateProgram(spec)),
            PrintProgram(GenerateProgram(other)));
}

TEST(Generate, ThousandProgramsAreWellFormed) {
  SplitMix64 rng(2024);
  for (int k = 0; k < 1000; ++k) {
    GenSpec spec;
    spec.size = 1 + rng.Below(64);
    spec.num_inputs = rng.Below(5);
    spec.num_outputs = 1 + rng.Below(std::min<std::size_t>(spec.size, 4));
    spec.seed = rng();
    const Program p = GenerateProgram(spec);
    ASSERT_EQ(p.size(), spec.size);
    ASSERT_EQ(p.input_cells.size(), spec.num_inputs);
    ASSERT_EQ(p.output_cells.size(), spec.num_outputs);
    ASSERT_TRUE(ValidateProgram(p).empty()) << PrintProgram(p);

    // Sources are inputs or earlier writes; outputs are written.
    std::vector<bool> ready(p.num_cells, false);
    for (Addr a : p.input_cells) ready[a] = true;
    for (const auto& ins : p.instructions) {
      const int sources = SourceCount(ins.op);
      if (sources >= 1) ASSERT_TRUE(ready[ins.a]) << PrintProgram(p);
      if (sources == 2) ASSERT_TRUE(ready[ins.b]) << PrintProgram(p);
      ready[ins.dst] = true;
    }
    for (Addr a : p.output_cells) ASSERT_TRUE(ready[a]);

    std::vector<Word> x(spec.num_inputs, 3);
    EXPECT_NO_THROW(Execute(p, x));
  }
}

TEST(Generate, OutputsWrittenLast) {
  GenSpec spec;
  spec.size = 20;
  spec.num_inputs = 2;
  spec.num_outputs = 3;
  spec.seed = 6;
  const Program p = GenerateProgram(spec);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(p.instructions[17 + k].dst, p.output_cells[k]);
  }
}

TEST(Generate, RespectsWeights) {
  GenSpec spec;
  spec.size = 50;
  spec.num_inputs = 2;
  spec.opcode_weights = {0, 0, 0, 0, 0, 1};
  spec.seed = 1;
  for (const auto& ins : GenerateProgram(spec).instructions) {
    EXPECT_EQ(ins.op, Opcode::kXor);
  }
}

TEST(Generate, SpecErrors) {
  GenSpec spec;
  spec.size = 2;
  spec.num_outputs = 3;
  EXPECT_EQ(CodeOf(spec), ErrorCode::kSpec);
  spec.num_outputs = 0;
  EXPECT_EQ(CodeOf(spec), ErrorCode::kSpec);
  spec.num_outputs = 1;
  spec.opcode_weights = {0, 0, 0, 0, 0, 0};
  EXPECT_EQ(CodeOf(spec), ErrorCode::kSpec);
  spec.opcode_weights = {1, -1, 1, 1, 1, 1};
  EXPECT_EQ(CodeOf(spec), ErrorCode::kSpec);
  spec.opcode_weights = {0, 1, 1, 1, 1, 1};
  spec.num_inputs = 0;
  EXPECT_EQ(CodeOf(spec), ErrorCode::kSpec);
}

TEST(Corpus, DistinctDerivedPrograms) {
  GenSpec spec;
  spec.size = 24;
  spec.num_inputs = 2;
  const auto one = GenerateCorpus(1, spec, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].name, "p0");

  const auto many = GenerateCorpus(100, spec, 5);
  std::set<std::string> prints;
  for (const auto& p : many) {
    Program unnamed = p;
    unnamed.name.clear();
    prints.insert(PrintProgram(unnamed));
  }
  EXPECT_EQ(prints.size(), 100u);
  EXPECT_EQ(many[0], one[0]);
  EXPECT_EQ(many[99].name, "p99");
}

TEST(Corpus, MostProgramsAreLive) {
  GenSpec spec;
  spec.size = 32;
  spec.num_inputs = 2;
  const auto corpus = GenerateCorpus(500, spec, 77);
  SplitMix64 rng(1);
  int live = 0;
  for (const auto& p : corpus) live += IsLive(p, rng) ? 1 : 0;
  RecordProperty("live", live);
  std::cout << "live programs: " << live << " / 500\n";
  EXPECT_GE(live, 450);
}

}  // namespace
}  // namespace decorr
