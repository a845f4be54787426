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

// Toy straight-line instruction set and its `.dasm` assembly format.
//
// Every instruction is memory-to-memory over a flat array of 64-bit cells:
//
//   CONST dst imm      cells[dst] = imm
//   MOV   dst a        cells[dst] = cells[a]
//   ADD   dst a b      cells[dst] = cells[a] + cells[b]   (mod 2^64)
//   SUB   dst a b      cells[dst] = cells[a] - cells[b]   (mod 2^64)
//   MUL   dst a b      cells[dst] = cells[a] * cells[b]   (mod 2^64)
//   XOR   dst a b      cells[dst] = cells[a] ^ cells[b]
//
// Assembly text: `.name label` (optional), `.cells N`, `.in A` and `.out A`
// (repeatable, ordered), then one instruction per line. `#` starts a comment.
// Directives must precede instructions. Literals are unsigned decimal.

#ifndef DECORR_ISA_H_
#define DECORR_ISA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decorr/error.h"

namespace decorr {

using Addr = std::uint32_t;
using Word = std::uint64_t;

enum class Opcode : std::uint8_t { kConst, kMov, kAdd, kSub, kMul, kXor };

inline constexpr int kNumOpcodes = 6;

std::string_view OpcodeName(Opcode op);
std::optional<Opcode> OpcodeFromName(std::string_view name);

// Number of source operands (0 for CONST, 1 for MOV, 2 otherwise).
int SourceCount(Opcode op);

struct Instruction {
  Opcode op = Opcode::kConst;
  Addr dst = 0;
  // Immediate for CONST, source cell otherwise.
  Word a = 0;
  // Second source cell; always 0 for CONST and MOV.
  Addr b = 0;

  static Instruction Const(Addr dst, Word imm) {
    return {Opcode::kConst, dst, imm, 0};
  }
  static Instruction Mov(Addr dst, Addr src) {
    return {Opcode::kMov, dst, src, 0};
  }
  static Instruction Binary(Opcode op, Addr dst, Addr a, Addr b) {
    return {op, dst, a, b};
  }

  bool operator==(const Instruction&) const = default;
};

struct Program {
  std::string name;
  Addr num_cells = 0;
  std::vector<Addr> input_cells;
  std::vector<Addr> output_cells;
  std::vector<Instruction> instructions;

  std::size_t size() const { return instructions.size(); }

  bool operator==(const Program&) const = default;
};

struct Violation {
  // Instruction index, or nullopt for directive-level problems.
  std::optional<std::size_t> index;
  ErrorCode code;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

Program ParseProgram(std::string_view text);

// Canonical text: directives first, single spaces, decimal literals, every
// line LF-terminated. ParseProgram inverts it exactly.
std::string PrintProgram(const Program& program);

std::string PrintInstruction(const Instruction& instruction);

// Empty iff every Program invariant holds.
std::vector<Violation> ValidateProgram(const Program& program);

// Throws the first violation as an Error.
void RequireValid(const Program& program);

}  // namespace decorr

#endif  // DECORR_ISA_H_
