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

#include "decorr/vm.h"

#include <bit>
#include <utility>

namespace decorr {
namespace {

Word Apply(const Instruction& ins, const std::vector<Word>& cells) {
  switch (ins.op) {
    case Opcode::kConst: return ins.a;
    case Opcode::kMov: return cells[ins.a];
    case Opcode::kAdd: return cells[ins.a] + cells[ins.b];
    case Opcode::kSub: return cells[ins.a] - cells[ins.b];
    case Opcode::kMul: return cells[ins.a] * cells[ins.b];
    case Opcode::kXor: return cells[ins.a] ^ cells[ins.b];
  }
  return 0;
}

Word MeasureStep(Word h, const Instruction& ins, std::uint64_t ordinal) {
  h = Mix(h, static_cast<Word>(ins.op) | (static_cast<Word>(ins.dst) << 8));
  h = Mix(h, ins.a);
  return Mix(h, static_cast<Word>(ins.b) ^ ((ordinal + 1) << 32));
}

void CheckBundleAddresses(const ObfBundle& bundle) {
  const auto bad = [&](Word addr) { return addr >= bundle.addr_space; };
  for (std::size_t t = 0; t < bundle.instructions.size(); ++t) {
    const auto& ins = bundle.instructions[t];
    const int sources = SourceCount(ins.op);
    if (bad(ins.dst) || (sources >= 1 && bad(ins.a)) ||
        (sources == 2 && bad(ins.b))) {
      throw Error(ErrorCode::kAddress,
                  "bundle instruction " + std::to_string(t) +
                      " addresses a cell >= addrSpace");
    }
  }
  for (const auto* map : {&bundle.input_map, &bundle.output_map}) {
    for (const auto& cells : *map) {
      for (Addr a : cells) {
        if (bad(a)) throw Error(ErrorCode::kAddress, "I/O cell >= addrSpace");
      }
    }
  }
}

}  // namespace

Word Mix(Word d, Word v) {
  Word t = d ^ (v * 0x9E3779B97F4A7C15ULL);
  t = std::rotl(t, 17);
  return t * 0xBF58476D1CE4E5B9ULL;
}

Word Prf(Word key, Word d, std::size_t i, std::size_t j) {
  return Mix(Mix(Mix(key, d), static_cast<Word>(i) + 1),
             static_cast<Word>(j) + 1);
}

Word StreamMeasurement(std::span<const Instruction> stream) {
  Word h = 0;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    h = MeasureStep(h, stream[k], k);
  }
  return h;
}

Outcome Execute(const Program& program, std::span<const Word> inputs,
                const ExecOptions& options) {
  RequireValid(program);
  if (inputs.size() != program.input_cells.size()) {
    throw Error(ErrorCode::kArity,
                "expected " + std::to_string(program.input_cells.size()) +
                    " inputs, got " + std::to_string(inputs.size()));
  }
  if (program.instructions.size() > options.step_budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::to_string(program.instructions.size()) +
                    " steps exceed budget " +
                    std::to_string(options.step_budget));
  }

  std::vector<Word> cells(program.num_cells, 0);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    cells[program.input_cells[k]] = inputs[k];
  }

  Outcome outcome;
  if (options.trace) outcome.trace.emplace();
  Word digest = 0;
  for (std::size_t t = 0; t < program.instructions.size(); ++t) {
    const auto& ins = program.instructions[t];
    const Word value = Apply(ins, cells);
    cells[ins.dst] = value;
    digest = Mix(digest, value ^ (static_cast<Word>(t) + 1));
    if (outcome.trace) outcome.trace->push_back({t, ins.dst, value});
  }

  std::vector<Word> out;
  out.reserve(program.output_cells.size());
  for (Addr a : program.output_cells) out.push_back(cells[a]);
  outcome.outputs = Outputs{std::move(out)};
  outcome.digest = digest;
  outcome.steps = program.instructions.size();
  return outcome;
}

Outcome ExecuteBundle(const ObfBundle& bundle, const Outputs& inputs,
                      const TamperSpec& tamper, std::optional<Word> key,
                      const ExecOptions& options) {
  if (inputs.size() != bundle.input_map.size()) {
    throw Error(ErrorCode::kArity,
                "expected inputs for " +
                    std::to_string(bundle.input_map.size()) +
                    " programs, got " + std::to_string(inputs.size()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != bundle.input_map[i].size()) {
      throw Error(ErrorCode::kArity,
                  "program " + std::to_string(i) + " expects " +
                      std::to_string(bundle.input_map[i].size()) +
                      " inputs, got " + std::to_string(inputs[i].size()));
    }
  }
  const bool tampered = tamper.kind != TamperKind::kSkipNone;
  if (tampered && tamper.index >= bundle.instructions.size()) {
    throw Error(ErrorCode::kTamper,
                "tamper index " + std::to_string(tamper.index) +
                    " >= stream length " +
                    std::to_string(bundle.instructions.size()));
  }
  const bool deleting = tamper.kind == TamperKind::kDeleteInstruction;
  const std::uint64_t planned = bundle.instructions.size() - (deleting ? 1 : 0);
  if (planned > options.step_budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::to_string(planned) + " steps exceed budget " +
                    std::to_string(options.step_budget));
  }
  CheckBundleAddresses(bundle);

  std::vector<Word> cells(bundle.addr_space, 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < inputs[i].size(); ++k) {
      cells[bundle.input_map[i][k]] = inputs[i][k];
    }
  }

  const bool encode = bundle.encoding_enabled && key.has_value();
  Outcome outcome;
  if (options.trace) outcome.trace.emplace();
  Word digest = bundle.digest_seed;
  Word executed_measure = 0;
  std::uint64_t ordinal = 0;
  for (std::size_t t = 0; t < bundle.instructions.size(); ++t) {
    if (deleting && t == tamper.index) continue;
    const auto& ins = bundle.instructions[t];
    Word value = Apply(ins, cells);
    if (tamper.kind == TamperKind::kReplaceWrite && t == tamper.index) {
      value = tamper.replacement_value;
    }
    cells[ins.dst] = value;
    digest = Mix(digest, value ^ (ordinal + 1));
    if (encode) executed_measure = MeasureStep(executed_measure, ins, ordinal);
    if (outcome.trace) outcome.trace->push_back({t, ins.dst, value});
    ++ordinal;
  }

  Outputs plain(bundle.output_map.size());
  for (std::size_t i = 0; i < bundle.output_map.size(); ++i) {
    for (Addr a : bundle.output_map[i]) plain[i].push_back(cells[a]);
  }
  outcome.digest = digest;
  outcome.steps = ordinal;

  if (!bundle.encoding_enabled) {
    outcome.outputs = std::move(plain);
  } else if (encode) {
    const Word mask_key =
        *key ^ executed_measure ^ StreamMeasurement(bundle.instructions);
    Outputs encoded = plain;
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      for (std::size_t j = 0; j < encoded[i].size(); ++j) {
        encoded[i][j] ^= Prf(mask_key, digest, i, j);
      }
    }
    outcome.outputs = std::move(plain);
    outcome.encoded_outputs = std::move(encoded);
  }
  return outcome;
}

Outputs DecodeOutputs(const Outputs& encoded, Word digest, Word key) {
  Outputs decoded = encoded;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    for (std::size_t j = 0; j < decoded[i].size(); ++j) {
      decoded[i][j] ^= Prf(key, digest, i, j);
    }
  }
  return decoded;
}

Outputs DecodeOutputs(const Outputs& encoded, Word digest,
                      std::optional<Word> key) {
  if (!key) throw Error(ErrorCode::kKeyRequired, "decoding needs the key");
  return DecodeOutputs(encoded, digest, *key);
}

std::string FormatTrace(std::span<const TraceEntry> trace) {
  std::string out;
  for (const auto& e : trace) {
    out += std::to_string(e.index);
    out += ' ';
    out += std::to_string(e.dst);
    out += ' ';
    out += std::to_string(e.value);
    out += '\n';
  }
  return out;
}

VmAccess::VmAccess(ObfBundle provisioned, std::uint64_t execution_budget,
                   ExecOptions options)
    : budget_(execution_budget), options_(options) {
  if (provisioned.secret) key_ = provisioned.secret->key;
  provisioned.secret.reset();
  view_ = std::move(provisioned);
  options_.trace = false;
}

Outcome VmAccess::Run(const Outputs& inputs, const TamperSpec& tamper) const {
  if (view_.encoding_enabled && !key_) {
    throw Error(ErrorCode::kKeyRequired,
                "encoding-enabled bundle but the VM holds no key");
  }
  if (executions_ >= budget_) {
    throw Error(ErrorCode::kBudgetExceeded,
                "execution budget of " + std::to_string(budget_) +
                    " runs exhausted");
  }
  ++executions_;
  Outcome outcome = ExecuteBundle(view_, inputs, tamper, key_, options_);
  if (view_.encoding_enabled) outcome.outputs.reset();
  return outcome;
}

}  // namespace decorr
