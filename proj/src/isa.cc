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

#include "decorr/isa.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

namespace decorr {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kAddress: return "AddressError";
    case ErrorCode::kDirective: return "DirectiveError";
    case ErrorCode::kArity: return "ArityError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kKeyRequired: return "KeyRequired";
    case ErrorCode::kTamper: return "TamperError";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kWitnessMismatch: return "WitnessMismatch";
    case ErrorCode::kSpec: return "SpecError";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

constexpr std::array<std::string_view, kNumOpcodes> kOpcodeNames = {
    "CONST", "MOV", "ADD", "SUB", "MUL", "XOR"};

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string At(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

Word ParseWord(std::string_view token, std::size_t line_no) {
  Word value = 0;
  const bool digits_only =
      !token.empty() &&
      token.find_first_not_of("0123456789") == std::string_view::npos;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (!digits_only || ec != std::errc() ||
      ptr != token.data() + token.size()) {
    throw Error(ErrorCode::kSyntax,
                At(line_no) + "malformed literal '" + std::string(token) + "'");
  }
  return value;
}

Addr ParseAddr(std::string_view token, std::size_t line_no) {
  const Word value = ParseWord(token, line_no);
  if (value > 0xFFFFFFFFULL) {
    throw Error(ErrorCode::kAddress,
                At(line_no) + "cell index " + std::string(token) +
                    " out of range");
  }
  return static_cast<Addr>(value);
}

bool NameIsPrintable(std::string_view name) {
  return name.find_first_of(" \t\r\n#") == std::string_view::npos;
}

}  // namespace

std::string_view OpcodeName(Opcode op) {
  return kOpcodeNames[static_cast<std::size_t>(op)];
}

std::optional<Opcode> OpcodeFromName(std::string_view name) {
  for (std::size_t i = 0; i < kOpcodeNames.size(); ++i) {
    if (kOpcodeNames[i] == name) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

int SourceCount(Opcode op) {
  switch (op) {
    case Opcode::kConst: return 0;
    case Opcode::kMov: return 1;
    default: return 2;
  }
}

Program ParseProgram(std::string_view text) {
  Program program;
  std::optional<Addr> cells;
  bool seen_instruction = false;
  std::set<Addr> seen_in, seen_out;
  // (line, address) pairs checked once `.cells` is known.
  std::vector<std::pair<std::size_t, Addr>> addresses;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = Tokenize(line);
    if (tokens.empty()) continue;

    const std::string_view head = tokens[0];
    if (head.front() == '.') {
      if (seen_instruction) {
        throw Error(ErrorCode::kDirective,
                    At(line_no) + "directive after first instruction");
      }
      if (tokens.size() != 2) {
        throw Error(ErrorCode::kSyntax,
                    At(line_no) + std::string(head) + " takes one operand");
      }
      if (head == ".cells") {
        if (cells) {
          throw Error(ErrorCode::kDirective, At(line_no) + "duplicate .cells");
        }
        cells = ParseAddr(tokens[1], line_no);
      } else if (head == ".in" || head == ".out") {
        const Addr addr = ParseAddr(tokens[1], line_no);
        auto& seen = head == ".in" ? seen_in : seen_out;
        if (!seen.insert(addr).second) {
          throw Error(ErrorCode::kDirective, At(line_no) + "duplicate " +
                                                 std::string(head) + " " +
                                                 std::to_string(addr));
        }
        (head == ".in" ? program.input_cells : program.output_cells)
            .push_back(addr);
        addresses.emplace_back(line_no, addr);
      } else if (head == ".name") {
        program.name = std::string(tokens[1]);
      } else {
        throw Error(ErrorCode::kSyntax,
                    At(line_no) + "unknown directive " + std::string(head));
      }
      continue;
    }

    seen_instruction = true;
    const auto op = OpcodeFromName(head);
    if (!op) {
      throw Error(ErrorCode::kSyntax,
                  At(line_no) + "unknown opcode " + std::string(head));
    }
    const int sources = SourceCount(*op);
    // CONST has no sources but still carries its immediate.
    const int operands = 1 + std::max(sources, 1);
    if (tokens.size() != static_cast<std::size_t>(1 + operands)) {
      throw Error(ErrorCode::kSyntax,
                  At(line_no) + std::string(head) + " expects " +
                      std::to_string(operands) + " operands");
    }
    Instruction ins;
    ins.op = *op;
    ins.dst = ParseAddr(tokens[1], line_no);
    addresses.emplace_back(line_no, ins.dst);
    if (*op == Opcode::kConst) {
      ins.a = ParseWord(tokens[2], line_no);
    } else {
      const Addr a = ParseAddr(tokens[2], line_no);
      ins.a = a;
      addresses.emplace_back(line_no, a);
      if (sources == 2) {
        ins.b = ParseAddr(tokens[3], line_no);
        addresses.emplace_back(line_no, ins.b);
      }
    }
    program.instructions.push_back(ins);
  }

  if (!cells) throw Error(ErrorCode::kDirective, "missing .cells directive");
  program.num_cells = *cells;
  for (const auto& [where, addr] : addresses) {
    if (addr >= program.num_cells) {
      throw Error(ErrorCode::kAddress,
                  At(where) + "cell " + std::to_string(addr) +
                      " >= .cells " + std::to_string(program.num_cells));
    }
  }
  return program;
}

std::string PrintInstruction(const Instruction& ins) {
  std::string out(OpcodeName(ins.op));
  out += ' ';
  out += std::to_string(ins.dst);
  out += ' ';
  out += std::to_string(ins.a);
  if (SourceCount(ins.op) == 2) {
    out += ' ';
    out += std::to_string(ins.b);
  }
  return out;
}

std::string PrintProgram(const Program& program) {
  std::string out;
  if (!program.name.empty()) out += ".name " + program.name + "\n";
  out += ".cells " + std::to_string(program.num_cells) + "\n";
  for (Addr a : program.input_cells) out += ".in " + std::to_string(a) + "\n";
  for (Addr a : program.output_cells) out += ".out " + std::to_string(a) + "\n";
  for (const auto& ins : program.instructions) {
    out += PrintInstruction(ins);
    out += '\n';
  }
  return out;
}

std::vector<Violation> ValidateProgram(const Program& program) {
  std::vector<Violation> violations;
  const auto cell_ok = [&](Word addr) { return addr < program.num_cells; };

  if (!NameIsPrintable(program.name)) {
    violations.push_back({std::nullopt, ErrorCode::kSyntax,
                          "name contains whitespace or '#'"});
  }
  for (const auto* list : {&program.input_cells, &program.output_cells}) {
    const char* which = list == &program.input_cells ? "input" : "output";
    std::set<Addr> seen;
    for (Addr addr : *list) {
      if (!cell_ok(addr)) {
        violations.push_back({std::nullopt, ErrorCode::kAddress,
                              std::string(which) + " cell " +
                                  std::to_string(addr) + " >= numCells"});
      }
      if (!seen.insert(addr).second) {
        violations.push_back({std::nullopt, ErrorCode::kDirective,
                              std::string("duplicate ") + which + " cell " +
                                  std::to_string(addr)});
      }
    }
  }
  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const auto& ins = program.instructions[i];
    if (static_cast<int>(ins.op) >= kNumOpcodes) {
      violations.push_back({i, ErrorCode::kSyntax, "unknown opcode"});
      continue;
    }
    if (!cell_ok(ins.dst)) {
      violations.push_back({i, ErrorCode::kAddress, "dst >= numCells"});
    }
    const int sources = SourceCount(ins.op);
    if (sources >= 1 && !cell_ok(ins.a)) {
      violations.push_back({i, ErrorCode::kAddress, "srcA >= numCells"});
    }
    if (sources == 2 && !cell_ok(ins.b)) {
      violations.push_back({i, ErrorCode::kAddress, "srcB >= numCells"});
    }
    if (sources < 2 && ins.b != 0) {
      violations.push_back({i, ErrorCode::kArity, "srcB set on unary opcode"});
    }
  }
  return violations;
}

void RequireValid(const Program& program) {
  const auto violations = ValidateProgram(program);
  if (violations.empty()) return;
  const auto& v = violations.front();
  std::string where =
      v.index ? "instruction " + std::to_string(*v.index) + ": " : "";
  throw Error(v.code, program.name + (program.name.empty() ? "" : ": ") +
                          where + v.rule);
}

}  // namespace decorr
