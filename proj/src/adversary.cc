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

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "decorr/rng.h"

namespace decorr {
namespace {

AdversaryPick UniformPair(std::size_t length, SplitMix64& rng) {
  if (length < 2) return {0, 0};
  const std::size_t first = rng.Below(length);
  std::size_t second = rng.Below(length - 1);
  if (second >= first) ++second;
  return {first, second};
}

AdversaryPick PairFrom(const std::vector<std::size_t>& members,
                       SplitMix64& rng) {
  const auto pick = UniformPair(members.size(), rng);
  return {members[pick.pos1], members[pick.pos2]};
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Tally {
  std::vector<std::uint64_t> both_s;
  std::vector<std::uint64_t> both_j;
  std::uint64_t faulted = 0;
};

void Score(const Witness& witness, std::uint32_t n, const AdversaryPick& pick,
           Tally& tally) {
  const std::size_t length = witness.origin.size();
  if (pick.pos1 == pick.pos2 || pick.pos1 >= length || pick.pos2 >= length) {
    ++tally.faulted;
    return;
  }
  const auto o1 = witness.origin[pick.pos1];
  const auto o2 = witness.origin[pick.pos2];
  for (std::uint32_t i = 0; i < n; ++i) {
    const bool in1 = o1 == i, in2 = o2 == i;
    if (in1 && in2) ++tally.both_s[i];
    if (!in1 && !in2) ++tally.both_j[i];
  }
}

}  // namespace

void RandomAdversary::Prepare(const ObfBundle& view, const AuxInput&) {
  length_ = view.size();
}

AdversaryPick RandomAdversary::Pick(std::uint64_t seed) const {
  SplitMix64 rng(seed);
  return UniformPair(length_, rng);
}

void SyntacticAdversary::Prepare(const ObfBundle& view, const AuxInput&) {
  length_ = view.size();
  std::array<std::vector<std::size_t>, kNumOpcodes> by_op;
  for (std::size_t t = 0; t < view.instructions.size(); ++t) {
    by_op[static_cast<int>(view.instructions[t].op)].push_back(t);
  }
  std::size_t best = 0;
  for (const auto& positions : by_op) best = std::max(best, positions.size());
  top_classes_.clear();
  if (best < 2) return;
  for (auto& positions : by_op) {
    if (positions.size() == best) top_classes_.push_back(std::move(positions));
  }
}

AdversaryPick SyntacticAdversary::Pick(std::uint64_t seed) const {
  SplitMix64 rng(seed);
  if (top_classes_.empty()) return UniformPair(length_, rng);
  const auto& members = top_classes_[rng.Below(top_classes_.size())];
  return PairFrom(members, rng);
}

void DataflowAdversary::Prepare(const ObfBundle& view, const AuxInput&) {
  length_ = view.size();
  std::vector<AdversaryPick> all_edges;
  std::unordered_map<Addr, std::size_t> last_writer;
  for (std::size_t t = 0; t < view.instructions.size(); ++t) {
    const auto& ins = view.instructions[t];
    const int sources = SourceCount(ins.op);
    const auto read = [&](Addr cell) {
      if (const auto it = last_writer.find(cell); it != last_writer.end()) {
        all_edges.push_back({it->second, t});
      }
    };
    if (sources >= 1) read(static_cast<Addr>(ins.a));
    if (sources == 2 && ins.b != ins.a) read(ins.b);
    last_writer[ins.dst] = t;
  }

  edges_.clear();
  if (all_edges.empty()) return;
  DisjointSets sets(length_);
  for (const auto& e : all_edges) sets.Union(e.pos1, e.pos2);
  // Component size counts positions touched by at least one edge.
  std::vector<std::size_t> touched(length_, 0);
  std::vector<bool> seen(length_, false);
  for (const auto& e : all_edges) {
    for (auto p : {e.pos1, e.pos2}) {
      if (!seen[p]) {
        seen[p] = true;
        ++touched[sets.Find(p)];
      }
    }
  }
  // Roots are component minima, so scanning upward breaks ties toward the
  // earliest component.
  std::size_t best_root = 0;
  for (std::size_t r = 0; r < length_; ++r) {
    if (touched[r] > touched[best_root]) best_root = r;
  }
  for (const auto& e : all_edges) {
    if (sets.Find(e.pos1) == best_root) edges_.push_back(e);
  }
}

AdversaryPick DataflowAdversary::Pick(std::uint64_t seed) const {
  SplitMix64 rng(seed);
  if (edges_.empty()) return UniformPair(length_, rng);
  return edges_[rng.Below(edges_.size())];
}

void TamperAdversary::Prepare(const ObfBundle& view, const AuxInput&) {
  length_ = view.size();
  clusters_.clear();
  focus_.clear();

  const auto observe = [](const Outcome& outcome) -> const Outputs& {
    if (outcome.encoded_outputs) return *outcome.encoded_outputs;
    if (outcome.outputs) return *outcome.outputs;
    throw Error(ErrorCode::kKeyRequired, "VM exposes no outputs");
  };
  const Outcome base = vm_.Run(inputs_);
  const Outputs reference = observe(base);

  for (std::size_t t = 0; t < length_; ++t) {
    const Outcome run = vm_.Run(inputs_, TamperSpec::Delete(t));
    const Outputs& seen = observe(run);
    std::vector<bool> signature;
    for (std::size_t i = 0; i < reference.size(); ++i) {
      for (std::size_t j = 0; j < reference[i].size(); ++j) {
        signature.push_back(seen[i][j] != reference[i][j]);
      }
    }
    clusters_[std::move(signature)].push_back(t);
  }

  if (clusters_.size() < 2) return;
  for (const auto& [signature, positions] : clusters_) {
    const bool empty =
        std::none_of(signature.begin(), signature.end(), [](bool b) { return b; });
    if (empty || positions.size() < 2) continue;
    if (positions.size() > focus_.size() ||
        (positions.size() == focus_.size() && positions[0] < focus_[0])) {
      focus_ = positions;
    }
  }
}

AdversaryPick TamperAdversary::Pick(std::uint64_t seed) const {
  SplitMix64 rng(seed);
  if (focus_.empty()) return UniformPair(length_, rng);
  return PairFrom(focus_, rng);
}

void OracleAdversary::Prepare(const ObfBundle& view, const AuxInput&) {
  length_ = view.size();
  members_.clear();
  for (std::size_t t = 0; t < witness_.origin.size(); ++t) {
    if (witness_.origin[t] == target_) members_.push_back(t);
  }
}

AdversaryPick OracleAdversary::Pick(std::uint64_t seed) const {
  SplitMix64 rng(seed);
  if (members_.size() < 2) return UniformPair(length_, rng);
  return PairFrom(members_, rng);
}

AdversaryPick AdversaryRandomPick(const ObfBundle& view, const AuxInput& z,
                                  std::uint64_t seed) {
  RandomAdversary adversary;
  adversary.Prepare(view, z);
  return adversary.Pick(seed);
}

AdversaryPick AdversarySyntacticPick(const ObfBundle& view, const AuxInput& z,
                                     std::uint64_t seed) {
  SyntacticAdversary adversary;
  adversary.Prepare(view, z);
  return adversary.Pick(seed);
}

AdversaryPick AdversaryDataflowPick(const ObfBundle& view, const AuxInput& z,
                                    std::uint64_t seed) {
  DataflowAdversary adversary;
  adversary.Prepare(view, z);
  return adversary.Pick(seed);
}

AdversaryPick AdversaryTamperPick(const ObfBundle& view, const AuxInput& z,
                                  std::uint64_t seed, const VmAccess& vm,
                                  const Outputs& inputs) {
  TamperAdversary adversary(vm, inputs);
  adversary.Prepare(view, z);
  return adversary.Pick(seed);
}

double PairBaseline(std::size_t members, std::size_t total) {
  if (total < 2 || members < 2) return 0.0;
  return (static_cast<double>(members) * static_cast<double>(members - 1)) /
         (static_cast<double>(total) * static_cast<double>(total - 1));
}

double Ci95(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

GameReport RunGame(const ObfBundle& view, const Witness& witness,
                   Adversary& adversary, const AuxInput& z,
                   std::uint64_t trials, std::uint64_t seed,
                   const GameOptions& options) {
  const std::size_t length = view.size();
  if (witness.origin.size() != length) {
    throw Error(ErrorCode::kWitnessMismatch,
                "witness covers " + std::to_string(witness.origin.size()) +
                    " positions, bundle has " + std::to_string(length));
  }
  const std::uint32_t n = view.n;
  for (auto o : witness.origin) {
    if (o >= n) {
      throw Error(ErrorCode::kWitnessMismatch,
                  "witness names program " + std::to_string(o) +
                      " but bundle has n=" + std::to_string(n));
    }
  }
  if (length < 2) {
    throw Error(ErrorCode::kInvalidArgument, "stream shorter than 2");
  }
  if (trials == 0 || trials < options.min_trials) {
    throw Error(ErrorCode::kInvalidArgument,
                "trials must be >= " +
                    std::to_string(std::max<std::uint64_t>(1, options.min_trials)));
  }
  if (z.bytes.size() > options.aux_cap) {
    throw Error(ErrorCode::kInvalidArgument, "auxiliary input exceeds cap");
  }

  adversary.Prepare(view, z);

  const std::size_t workers = std::clamp<std::size_t>(
      options.workers, 1, static_cast<std::size_t>(std::min<std::uint64_t>(trials, 64)));
  std::vector<Tally> tallies(workers, Tally{std::vector<std::uint64_t>(n, 0),
                                            std::vector<std::uint64_t>(n, 0), 0});
  const auto run_range = [&](std::size_t w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    for (std::uint64_t t = begin; t < end; ++t) {
      Score(witness, n, adversary.Pick(DeriveSeed(seed, t)), tallies[w]);
    }
  };
  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run_range, w);
  }

  Tally total{std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0), 0};
  for (const auto& t : tallies) {
    for (std::uint32_t i = 0; i < n; ++i) {
      total.both_s[i] += t.both_s[i];
      total.both_j[i] += t.both_j[i];
    }
    total.faulted += t.faulted;
  }

  GameReport report;
  report.adversary_name = std::string(adversary.name());
  report.seed = seed;
  report.trials = trials;
  report.faulted = total.faulted;
  report.stream_length = length;
  const auto counts = OriginCounts(witness, n);
  const auto denom = static_cast<double>(trials);
  for (std::uint32_t i = 0; i < n; ++i) {
    ProgramScore s;
    s.members = counts[i];
    s.count_both_s = total.both_s[i];
    s.count_both_j = total.both_j[i];
    s.count_split = trials - s.count_both_s - s.count_both_j;
    s.est_both_s = static_cast<double>(s.count_both_s) / denom;
    s.est_both_j = static_cast<double>(s.count_both_j) / denom;
    s.est_split = static_cast<double>(s.count_split) / denom;
    s.base_both_s = PairBaseline(counts[i], length);
    s.base_both_j = PairBaseline(length - counts[i], length);
    s.adv_eq2 = std::abs(s.est_both_s - s.base_both_s);
    s.adv_eq3 = std::abs((s.est_both_s + s.est_both_j) -
                         (s.base_both_s + s.base_both_j));
    s.ci95_both_s = Ci95(s.est_both_s, trials);
    s.ci95_both_j = Ci95(s.est_both_j, trials);
    s.ci95_split = Ci95(s.est_split, trials);
    report.max_adv_eq2 = std::max(report.max_adv_eq2, s.adv_eq2);
    report.max_adv_eq3 = std::max(report.max_adv_eq3, s.adv_eq3);
    report.programs.push_back(s);
  }
  return report;
}

std::unique_ptr<Adversary> MakeAdversary(std::string_view name,
                                         const VmAccess* vm,
                                         const Outputs* inputs,
                                         const Witness* witness,
                                         std::uint32_t oracle_target) {
  if (name == "random") return std::make_unique<RandomAdversary>();
  if (name == "syntactic") return std::make_unique<SyntacticAdversary>();
  if (name == "dataflow") return std::make_unique<DataflowAdversary>();
  if (name == "tamper") {
    if (vm == nullptr || inputs == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tamper adversary needs VM access and inputs");
    }
    return std::make_unique<TamperAdversary>(*vm, *inputs);
  }
  if (name == "oracle") {
    if (witness == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "oracle adversary needs the witness");
    }
    return std::make_unique<OracleAdversary>(*witness, oracle_target);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown adversary '" + std::string(name) + "'");
}

}  // namespace decorr
