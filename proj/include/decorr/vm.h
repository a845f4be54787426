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

// Deterministic execution of programs and bundles.
//
// Every executed instruction folds its written value into a 64-bit digest:
//
//   D <- Mix(D, written ^ (ordinal + 1))
//
// where ordinal is the post-tamper position. With encoding enabled, output
// word (i, j) is published as y[i][j] ^ Prf(k, D, i, j). The mask key k is
// the bundle key XOR H(executed stream) XOR H(bundle stream); for an
// untampered run the two measurements cancel and k is the bundle key, while
// a deleted instruction changes k and garbles every decoded word.

#ifndef DECORR_VM_H_
#define DECORR_VM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decorr/bundle.h"
#include "decorr/isa.h"

namespace decorr {

inline constexpr std::uint64_t kDefaultStepBudget = std::uint64_t{1} << 20;

using Outputs = std::vector<std::vector<Word>>;

struct TraceEntry {
  std::size_t index;
  Addr dst;
  Word value;

  bool operator==(const TraceEntry&) const = default;
};

struct Outcome {
  // Plaintext Y. Absent when encoding is on and no key was supplied.
  std::optional<Outputs> outputs;
  // Present iff encoding is on and a key was supplied.
  std::optional<Outputs> encoded_outputs;
  Word digest = 0;
  std::uint64_t steps = 0;
  std::optional<std::vector<TraceEntry>> trace;

  bool operator==(const Outcome&) const = default;
};

enum class TamperKind { kSkipNone, kDeleteInstruction, kReplaceWrite };

struct TamperSpec {
  TamperKind kind = TamperKind::kSkipNone;
  std::size_t index = 0;
  Word replacement_value = 0;

  static TamperSpec None() { return {}; }
  static TamperSpec Delete(std::size_t index) {
    return {TamperKind::kDeleteInstruction, index, 0};
  }
  static TamperSpec Replace(std::size_t index, Word value) {
    return {TamperKind::kReplaceWrite, index, value};
  }
};

struct ExecOptions {
  std::uint64_t step_budget = kDefaultStepBudget;
  bool trace = false;
};

Word Mix(Word d, Word v);
Word Prf(Word key, Word d, std::size_t i, std::size_t j);

// Mix-fold over (opcode, operands, ordinal) of an instruction sequence.
Word StreamMeasurement(std::span<const Instruction> stream);

// Reference semantics for a single program. The digest chain starts at 0.
Outcome Execute(const Program& program, std::span<const Word> inputs,
                const ExecOptions& options = {});

Outcome ExecuteBundle(const ObfBundle& bundle, const Outputs& inputs,
                      const TamperSpec& tamper = TamperSpec::None(),
                      std::optional<Word> key = std::nullopt,
                      const ExecOptions& options = {});

Outputs DecodeOutputs(const Outputs& encoded, Word digest, Word key);

// Convenience over DecodeOutputs that fails with KeyRequired when the
// caller holds no key.
Outputs DecodeOutputs(const Outputs& encoded, Word digest,
                      std::optional<Word> key);

// One `index dst value` line per step.
std::string FormatTrace(std::span<const TraceEntry> trace);

// Sealed execution capability over a provisioned bundle. Holders can run the
// bundle with tampering and observe what an evaluator observes (digest,
// steps, and encoded outputs, or plaintext when encoding is off) but never
// the key. Each Run counts against an execution budget.
class VmAccess {
 public:
  explicit VmAccess(ObfBundle provisioned,
                    std::uint64_t execution_budget = 1u << 20,
                    ExecOptions options = {});

  Outcome Run(const Outputs& inputs,
              const TamperSpec& tamper = TamperSpec::None()) const;

  // The published bundle (secrets stripped).
  const ObfBundle& view() const { return view_; }
  std::uint64_t executions() const { return executions_; }

 private:
  ObfBundle view_;
  std::optional<Word> key_;
  std::uint64_t budget_;
  ExecOptions options_;
  mutable std::uint64_t executions_ = 0;
};

}  // namespace decorr

#endif  // DECORR_VM_H_
