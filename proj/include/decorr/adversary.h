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

// Pairwise distinguishing games.
//
// An adversary sees the published bundle (and optionally runs it) and names
// two distinct stream positions. For every program i the game scores whether
// both lie in S_i (instructions of p_i), both lie in J_i (everything else),
// or the pair is split, and compares against a uniformly random distinct
// pair:
//
//   baseBothS_i = m_i (m_i - 1) / (M (M - 1))
//   baseBothJ_i = j_i (j_i - 1) / (M (M - 1)),   j_i = M - m_i
//
//   advEq2_i = |P[both in S_i] - baseBothS_i|
//   advEq3_i = |P[both in S_i or both in J_i] - (baseBothS_i + baseBothJ_i)|

#ifndef DECORR_ADVERSARY_H_
#define DECORR_ADVERSARY_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "decorr/bundle.h"
#include "decorr/vm.h"

namespace decorr {

struct AdversaryPick {
  std::size_t pos1 = 0;
  std::size_t pos2 = 0;

  bool operator==(const AdversaryPick&) const = default;
};

inline constexpr std::size_t kDefaultAuxCap = std::size_t{1} << 20;

// Auxiliary input z handed to every adversary.
struct AuxInput {
  std::string bytes;
};

// Adversaries are prepared once per game with their view, then asked for one
// pick per trial. Pick must be safe to call concurrently.
class Adversary {
 public:
  virtual ~Adversary() = default;

  virtual std::string_view name() const = 0;
  virtual void Prepare(const ObfBundle& view, const AuxInput& z) = 0;
  virtual AdversaryPick Pick(std::uint64_t seed) const = 0;
};

// Uniform distinct pair; the null model behind the baselines.
class RandomAdversary : public Adversary {
 public:
  std::string_view name() const override { return "random"; }
  void Prepare(const ObfBundle& view, const AuxInput& z) override;
  AdversaryPick Pick(std::uint64_t seed) const override;

 private:
  std::size_t length_ = 0;
};

// Two positions sharing the most frequent opcode (ties broken per trial).
class SyntacticAdversary : public Adversary {
 public:
  std::string_view name() const override { return "syntactic"; }
  void Prepare(const ObfBundle& view, const AuxInput& z) override;
  AdversaryPick Pick(std::uint64_t seed) const override;

 private:
  std::size_t length_ = 0;
  // Position lists of the opcodes tied for most frequent (>= 2 uses).
  std::vector<std::vector<std::size_t>> top_classes_;
};

// A def-use pair (reaching definition -> reader) from the largest weakly
// connected component of the def-use graph.
class DataflowAdversary : public Adversary {
 public:
  std::string_view name() const override { return "dataflow"; }
  void Prepare(const ObfBundle& view, const AuxInput& z) override;
  AdversaryPick Pick(std::uint64_t seed) const override;

  const std::vector<AdversaryPick>& focus_edges() const { return edges_; }

 private:
  std::size_t length_ = 0;
  std::vector<AdversaryPick> edges_;
};

// Delete-and-diff: for every position t, run the bundle with t deleted and
// record which observable output words changed. Positions with the same
// non-empty change signature form a cluster; picks come from the largest
// cluster. Falls back to random when every signature is identical or no
// non-empty cluster has two members.
class TamperAdversary : public Adversary {
 public:
  TamperAdversary(const VmAccess& vm, Outputs inputs)
      : vm_(vm), inputs_(std::move(inputs)) {}

  std::string_view name() const override { return "tamper"; }
  void Prepare(const ObfBundle& view, const AuxInput& z) override;
  AdversaryPick Pick(std::uint64_t seed) const override;

  // Signature (one flag per flattened output word) -> positions.
  const std::map<std::vector<bool>, std::vector<std::size_t>>& clusters()
      const {
    return clusters_;
  }
  bool fell_back() const { return focus_.empty(); }

 private:
  const VmAccess& vm_;
  Outputs inputs_;
  std::size_t length_ = 0;
  std::map<std::vector<bool>, std::vector<std::size_t>> clusters_;
  std::vector<std::size_t> focus_;
};

// Test and calibration only: reads the witness and always picks two members
// of S_target, the best any adversary can do for that target.
class OracleAdversary : public Adversary {
 public:
  OracleAdversary(const Witness& witness, std::uint32_t target)
      : witness_(witness), target_(target) {}

  std::string_view name() const override { return "oracle"; }
  void Prepare(const ObfBundle& view, const AuxInput& z) override;
  AdversaryPick Pick(std::uint64_t seed) const override;

 private:
  const Witness& witness_;
  std::uint32_t target_;
  std::size_t length_ = 0;
  std::vector<std::size_t> members_;
};

// One-shot forms: prepare and pick once.
AdversaryPick AdversaryRandomPick(const ObfBundle& view, const AuxInput& z,
                                  std::uint64_t seed);
AdversaryPick AdversarySyntacticPick(const ObfBundle& view, const AuxInput& z,
                                     std::uint64_t seed);
AdversaryPick AdversaryDataflowPick(const ObfBundle& view, const AuxInput& z,
                                    std::uint64_t seed);
AdversaryPick AdversaryTamperPick(const ObfBundle& view, const AuxInput& z,
                                  std::uint64_t seed, const VmAccess& vm,
                                  const Outputs& inputs);

struct ProgramScore {
  std::size_t members = 0;  // m_i
  std::uint64_t count_both_s = 0;
  std::uint64_t count_both_j = 0;
  std::uint64_t count_split = 0;
  double est_both_s = 0;
  double est_both_j = 0;
  double est_split = 0;
  double base_both_s = 0;
  double base_both_j = 0;
  double adv_eq2 = 0;
  double adv_eq3 = 0;
  double ci95_both_s = 0;
  double ci95_both_j = 0;
  double ci95_split = 0;
};

struct GameReport {
  std::string adversary_name;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t faulted = 0;
  std::size_t stream_length = 0;
  std::vector<ProgramScore> programs;
  double max_adv_eq2 = 0;
  double max_adv_eq3 = 0;
};

struct GameOptions {
  std::size_t workers = 1;
  std::uint64_t min_trials = 1000;
  std::size_t aux_cap = kDefaultAuxCap;
};

// Exact random-pair probability that both picks land in a set of `members`
// out of `total` positions.
double PairBaseline(std::size_t members, std::size_t total);

// Normal-approximation 95% half-width.
double Ci95(double p, std::uint64_t trials);

GameReport RunGame(const ObfBundle& view, const Witness& witness,
                   Adversary& adversary, const AuxInput& z,
                   std::uint64_t trials, std::uint64_t seed,
                   const GameOptions& options = {});

// Builds the named built-in adversary. `vm` and `inputs` are required for
// "tamper"; `witness` for "oracle".
std::unique_ptr<Adversary> MakeAdversary(std::string_view name,
                                         const VmAccess* vm,
                                         const Outputs* inputs,
                                         const Witness* witness,
                                         std::uint32_t oracle_target = 0);

}  // namespace decorr

#endif  // DECORR_ADVERSARY_H_
