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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "decorr/rng.h"

namespace decorr {
namespace {

void CheckSpec(const GenSpec& spec) {
  if (spec.num_outputs == 0) {
    throw Error(ErrorCode::kSpec, "need at least one output");
  }
  if (spec.num_outputs > spec.size) {
    throw Error(ErrorCode::kSpec, "numOutputs " +
                                      std::to_string(spec.num_outputs) +
                                      " > size " + std::to_string(spec.size));
  }
  double total = 0;
  for (double w : spec.opcode_weights) {
    if (!std::isfinite(w) || w < 0) {
      throw Error(ErrorCode::kSpec, "opcode weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0) throw Error(ErrorCode::kSpec, "all opcode weights are zero");
  if (spec.num_inputs == 0 &&
      spec.opcode_weights[static_cast<int>(Opcode::kConst)] <= 0) {
    throw Error(ErrorCode::kSpec,
                "no inputs and CONST weight 0: first instruction has nothing "
                "to read");
  }
  if (spec.num_inputs + spec.size > 0xFFFFFFFFULL) {
    throw Error(ErrorCode::kSpec, "program too large");
  }
}

Opcode PickOpcode(const std::array<double, kNumOpcodes>& weights,
                  bool allow_const, SplitMix64& rng) {
  double total = 0;
  for (int k = 0; k < kNumOpcodes; ++k) {
    if (allow_const || k != static_cast<int>(Opcode::kConst)) {
      total += weights[k];
    }
  }
  double r = rng.Unit() * total;
  int last = 0;
  for (int k = 0; k < kNumOpcodes; ++k) {
    if (!allow_const && k == static_cast<int>(Opcode::kConst)) continue;
    if (weights[k] <= 0) continue;
    last = k;
    if (r < weights[k]) return static_cast<Opcode>(k);
    r -= weights[k];
  }
  return static_cast<Opcode>(last);
}

// Biased toward recent writes so that values flow into the outputs.
Addr PickSource(const std::vector<Addr>& readable, SplitMix64& rng) {
  const std::size_t n = readable.size();
  if (n > 4 && rng.Below(2) == 0) {
    return readable[n - 1 - rng.Below(4)];
  }
  return readable[rng.Below(n)];
}

}  // namespace

Program GenerateProgram(const GenSpec& spec) {
  CheckSpec(spec);
  SplitMix64 rng(spec.seed);

  Program program;
  std::vector<Addr> readable(spec.num_inputs);
  std::iota(readable.begin(), readable.end(), Addr{0});
  program.input_cells = readable;
  std::vector<Addr> overwritable;
  Addr next_fresh = static_cast<Addr>(spec.num_inputs);
  // Cells whose current value was computed from some input.
  std::vector<bool> tainted(spec.num_inputs + spec.size, false);
  std::fill_n(tainted.begin(), spec.num_inputs, true);

  double non_const_weight = 0;
  for (int k = 0; k < kNumOpcodes; ++k) {
    if (k != static_cast<int>(Opcode::kConst)) {
      non_const_weight += spec.opcode_weights[k];
    }
  }

  for (std::size_t k = 0; k < spec.size; ++k) {
    const bool output_slot = k >= spec.size - spec.num_outputs;
    Opcode op = Opcode::kConst;
    if (!readable.empty()) {
      const bool allow_const = !(output_slot && non_const_weight > 0);
      op = PickOpcode(spec.opcode_weights, allow_const, rng);
    }

    Addr dst;
    const bool fresh =
        output_slot || overwritable.empty() || rng.Below(2) == 0;
    if (fresh) {
      dst = next_fresh++;
    } else {
      dst = overwritable[rng.Below(overwritable.size())];
    }

    // Output slots read an input-derived cell when one exists.
    const auto pick_first = [&] {
      const Addr a = PickSource(readable, rng);
      if (!output_slot || tainted[a]) return a;
      std::vector<Addr> live;
      for (Addr r : readable) {
        if (tainted[r]) live.push_back(r);
      }
      return live.empty() ? a : live[rng.Below(live.size())];
    };

    Instruction ins;
    ins.op = op;
    ins.dst = dst;
    switch (SourceCount(op)) {
      case 0:
        ins.a = rng();
        break;
      case 1:
        ins.a = pick_first();
        break;
      default: {
        const Addr a = pick_first();
        Addr b = PickSource(readable, rng);
        for (int tries = 0; b == a && readable.size() > 1 && tries < 8;
             ++tries) {
          b = readable[rng.Below(readable.size())];
        }
        ins.a = a;
        ins.b = b;
      }
    }
    program.instructions.push_back(ins);
    const int sources = SourceCount(op);
    tainted[dst] = (sources >= 1 && tainted[static_cast<Addr>(ins.a)]) ||
                   (sources == 2 && tainted[ins.b]);

    if (fresh) {
      readable.push_back(dst);
      if (output_slot) {
        program.output_cells.push_back(dst);
      } else {
        overwritable.push_back(dst);
      }
    }
  }
  program.num_cells = next_fresh;
  return program;
}

std::vector<Program> GenerateCorpus(std::size_t n, const GenSpec& spec,
                                    std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kSpec, "corpus size must be >= 1");
  std::vector<Program> corpus;
  corpus.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    GenSpec derived = spec;
    derived.seed = DeriveSeed(seed, k);
    Program p = GenerateProgram(derived);
    p.name = "p" + std::to_string(k);
    corpus.push_back(std::move(p));
  }
  return corpus;
}

}  // namespace decorr
