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

#include "decorr/obfuscator.h"

#include <algorithm>
#include <bit>
#include <numeric>

#include "decorr/rng.h"

namespace decorr {
namespace {

// Stream tags for DeriveSeed; each concern gets its own generator so that
// changing one stage never perturbs another.
enum SeedStream : std::uint64_t {
  kPermutationStream = 1,
  kPaddingStream = 2,
  kInterleaveStream = 3,
  kKeyStream = 4,
};

// Local cell layout of one program before relocation:
//   [0, num_cells)                      the program's own cells
//   [num_cells, num_cells + lambda)     padding scratch
//   num_cells + lambda                  zero cell, never written
struct LocalLayout {
  Addr num_cells;
  std::uint32_t lambda;

  Addr scratch(std::uint32_t k) const { return num_cells + k; }
  Addr zero() const { return num_cells + lambda; }
  std::uint64_t total() const {
    return std::uint64_t{num_cells} + lambda + 1;
  }
};

std::vector<Instruction> Canonicalize(const Program& program,
                                      const LocalLayout& layout) {
  std::vector<Instruction> out;
  out.reserve(program.instructions.size());
  for (const auto& ins : program.instructions) {
    if (ins.op == Opcode::kMov) {
      out.push_back(Instruction::Binary(Opcode::kAdd, ins.dst,
                                        static_cast<Addr>(ins.a),
                                        layout.zero()));
    } else {
      out.push_back(ins);
    }
  }
  return out;
}

std::vector<Instruction> MakePadding(std::size_t count,
                                     const LocalLayout& layout,
                                     SplitMix64& rng) {
  std::vector<Instruction> padding;
  padding.reserve(count);
  std::vector<std::uint32_t> written;
  std::vector<bool> is_written(layout.lambda, false);
  for (std::size_t k = 0; k < count; ++k) {
    const auto target = static_cast<std::uint32_t>(rng.Below(layout.lambda));
    const bool use_const = written.empty() || rng.Below(2) == 0;
    if (use_const) {
      padding.push_back(Instruction::Const(layout.scratch(target), rng()));
    } else {
      const auto x = written[rng.Below(written.size())];
      const auto y = written[rng.Below(written.size())];
      padding.push_back(Instruction::Binary(Opcode::kXor,
                                            layout.scratch(target),
                                            layout.scratch(x),
                                            layout.scratch(y)));
    }
    if (!is_written[target]) {
      is_written[target] = true;
      written.push_back(target);
    }
  }
  return padding;
}

Instruction Relocate(const Instruction& ins, std::span<const Addr> map) {
  Instruction out = ins;
  out.dst = map[ins.dst];
  const int sources = SourceCount(ins.op);
  if (sources >= 1) out.a = map[static_cast<std::size_t>(ins.a)];
  if (sources == 2) out.b = map[ins.b];
  return out;
}

}  // namespace

std::vector<std::size_t> OriginCounts(const Witness& witness,
                                      std::uint32_t n) {
  std::vector<std::size_t> counts(n, 0);
  for (auto o : witness.origin) {
    if (o < n) ++counts[o];
  }
  return counts;
}

std::vector<std::size_t> PaddedLengths(std::span<const std::size_t> sizes,
                                       std::uint32_t lambda) {
  if (sizes.empty()) return {};
  const std::uint64_t n = sizes.size();
  const std::uint64_t longest = *std::max_element(sizes.begin(), sizes.end());
  const std::uint64_t common = (longest + 1 + lambda - 1) / lambda * lambda;
  const std::uint64_t budget =
      std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0}) +
      n * lambda;
  if (n * common <= budget) return std::vector<std::size_t>(n, common);

  const auto total_at = [&](std::uint64_t level) {
    std::uint64_t total = 0;
    for (auto s : sizes) total += std::max<std::uint64_t>(s + 1, level);
    return total;
  };
  // Largest level whose total still fits; level 0 always fits since every
  // program gets s + 1 <= s + lambda.
  std::uint64_t lo = 0, hi = common;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (total_at(mid) <= budget) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  std::vector<std::size_t> lengths;
  lengths.reserve(n);
  for (auto s : sizes) lengths.push_back(std::max<std::uint64_t>(s + 1, lo));
  return lengths;
}

std::vector<std::uint32_t> InterleavePositions(
    std::span<const std::size_t> sizes, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::size_t> remaining(sizes.begin(), sizes.end());
  std::uint64_t total =
      std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
  std::vector<std::uint32_t> origin;
  origin.reserve(total);
  while (total > 0) {
    std::uint64_t r = rng.Below(total);
    std::uint32_t i = 0;
    while (r >= remaining[i]) {
      r -= remaining[i];
      ++i;
    }
    origin.push_back(i);
    --remaining[i];
    --total;
  }
  return origin;
}

ObfuscationResult Obfuscate(std::span<const Program> programs,
                            std::uint32_t lambda, std::uint64_t seed,
                            bool encode) {
  if (programs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no programs to obfuscate");
  }
  if (lambda == 0) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 1");
  }
  const auto n = static_cast<std::uint32_t>(programs.size());
  std::vector<LocalLayout> layouts;
  std::vector<std::size_t> sizes;
  std::uint64_t total_cells = 0;
  for (const auto& p : programs) {
    RequireValid(p);
    if (p.instructions.empty()) {
      throw Error(ErrorCode::kEmptyInput,
                  "program '" + p.name + "' has no instructions");
    }
    layouts.push_back({p.num_cells, lambda});
    sizes.push_back(p.instructions.size());
    total_cells += layouts.back().total();
  }
  if (total_cells > kMaxAddrSpace) {
    throw Error(ErrorCode::kOverflow, "cell demand exceeds address-space cap");
  }
  const std::uint64_t addr_space = std::bit_ceil(2 * total_cells);
  if (addr_space > kMaxAddrSpace) {
    throw Error(ErrorCode::kOverflow,
                "address space " + std::to_string(addr_space) +
                    " exceeds cap " + std::to_string(kMaxAddrSpace));
  }

  SplitMix64 perm_rng(DeriveSeed(seed, kPermutationStream));
  std::vector<Addr> permutation(addr_space);
  std::iota(permutation.begin(), permutation.end(), Addr{0});
  perm_rng.Shuffle(std::span<Addr>(permutation));

  const auto lengths = PaddedLengths(sizes, lambda);
  SplitMix64 pad_rng(DeriveSeed(seed, kPaddingStream));

  ObfuscationResult result;
  ObfBundle& bundle = result.bundle;
  Witness& witness = result.witness;
  witness.cell_origin.assign(addr_space, kScratchOrigin);

  std::vector<std::vector<Instruction>> chains(n);
  std::size_t offset = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& program = programs[i];
    const auto& layout = layouts[i];
    const std::span<const Addr> map(permutation.data() + offset,
                                    layout.total());
    offset += layout.total();
    for (Addr global : map) witness.cell_origin[global] = static_cast<int>(i);

    const auto body = Canonicalize(program, layout);
    const auto padding =
        MakePadding(lengths[i] - body.size(), layout, pad_rng);
    const std::size_t chain_sizes[] = {body.size(), padding.size()};
    const auto placement =
        InterleavePositions(chain_sizes, pad_rng());
    std::size_t next_body = 0, next_pad = 0;
    chains[i].reserve(lengths[i]);
    for (auto which : placement) {
      const auto& ins = which == 0 ? body[next_body++] : padding[next_pad++];
      chains[i].push_back(Relocate(ins, map));
    }

    std::vector<Addr> ins_cells, outs_cells;
    for (Addr a : program.input_cells) ins_cells.push_back(map[a]);
    for (Addr a : program.output_cells) outs_cells.push_back(map[a]);
    bundle.input_map.push_back(std::move(ins_cells));
    bundle.output_map.push_back(std::move(outs_cells));
  }

  witness.origin =
      InterleavePositions(lengths, DeriveSeed(seed, kInterleaveStream));
  std::vector<std::size_t> cursor(n, 0);
  bundle.instructions.reserve(witness.origin.size());
  for (auto i : witness.origin) {
    bundle.instructions.push_back(chains[i][cursor[i]++]);
  }

  SplitMix64 key_rng(DeriveSeed(seed, kKeyStream));
  bundle.addr_space = static_cast<Addr>(addr_space);
  bundle.lambda = lambda;
  bundle.n = n;
  bundle.encoding_enabled = encode;
  bundle.digest_seed = key_rng();
  bundle.size_bound = {1, 1};
  if (encode) bundle.secret = SecretSection{key_rng()};
  return result;
}

ObfBundle StripSecrets(const ObfBundle& bundle) {
  ObfBundle view = bundle;
  view.secret.reset();
  return view;
}

ObfuscationResult ConcatenateNaive(std::span<const Program> programs) {
  if (programs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no programs to concatenate");
  }
  ObfuscationResult result;
  ObfBundle& bundle = result.bundle;
  std::uint64_t base = 0;
  for (std::uint32_t i = 0; i < programs.size(); ++i) {
    const auto& p = programs[i];
    RequireValid(p);
    std::vector<Addr> map(p.num_cells);
    std::iota(map.begin(), map.end(), static_cast<Addr>(base));
    for (const auto& ins : p.instructions) {
      bundle.instructions.push_back(Relocate(ins, map));
      result.witness.origin.push_back(i);
    }
    std::vector<Addr> ins_cells, outs_cells;
    for (Addr a : p.input_cells) ins_cells.push_back(map[a]);
    for (Addr a : p.output_cells) outs_cells.push_back(map[a]);
    bundle.input_map.push_back(std::move(ins_cells));
    bundle.output_map.push_back(std::move(outs_cells));
    result.witness.cell_origin.insert(result.witness.cell_origin.end(),
                                      p.num_cells, static_cast<int>(i));
    base += p.num_cells;
  }
  if (base > kMaxAddrSpace) {
    throw Error(ErrorCode::kOverflow, "cell demand exceeds address-space cap");
  }
  bundle.addr_space = static_cast<Addr>(base);
  bundle.n = static_cast<std::uint32_t>(programs.size());
  bundle.lambda = 1;
  return result;
}

}  // namespace decorr
