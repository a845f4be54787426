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

// decorr: command-line front end.
//
// JSON results go to stdout (or --out); summaries go to stderr.
// Exit codes: 0 success, 1 usage error, 2 domain error (invalid input,
// failed verification), 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "decorr/adversary.h"
#include "decorr/isa.h"
#include "decorr/obfuscator.h"
#include "decorr/progen.h"
#include "decorr/rng.h"
#include "decorr/serialize.h"
#include "decorr/vcp.h"
#include "decorr/vm.h"

namespace {

using namespace decorr;

constexpr std::uint64_t kDefaultSeed = 0x5EED;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown after the verdict has been written, to exit 2 without a message.
struct Rejected {};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteOut(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

std::size_t WorkerCount() {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("DECORR_THREADS")) {
    try {
      const auto v = std::stoul(cap);
      if (v >= 1) workers = std::min<std::size_t>(workers, v);
    } catch (const std::exception&) {
      throw UsageError("DECORR_THREADS must be a positive integer");
    }
  }
  return workers;
}

std::vector<Word> ParseWordList(const std::string& text) {
  std::vector<Word> words;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    try {
      words.push_back(std::stoull(item, &used, 10));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') {
      throw UsageError("bad word '" + item + "' in list");
    }
  }
  return words;
}

std::array<double, kNumOpcodes> ParseWeights(const std::string& text) {
  std::array<double, kNumOpcodes> weights{};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    const auto op = OpcodeFromName(item.substr(0, eq));
    if (eq == std::string::npos || !op) {
      throw UsageError("weights look like CONST=1,ADD=2,...");
    }
    try {
      weights[static_cast<int>(*op)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad weight in '" + item + "'");
    }
  }
  return weights;
}

Outputs RandomInputs(const ObfBundle& bundle, std::uint64_t seed) {
  SplitMix64 rng(DeriveSeed(seed, 0x1A9u));
  Outputs inputs;
  for (const auto& cells : bundle.input_map) {
    std::vector<Word> row;
    for (std::size_t k = 0; k < cells.size(); ++k) row.push_back(rng());
    inputs.push_back(std::move(row));
  }
  return inputs;
}

TamperSpec ParseTamper(const std::string& del, const std::string& replace) {
  if (!del.empty() && !replace.empty()) {
    throw UsageError("--tamper-delete and --tamper-replace are exclusive");
  }
  try {
    if (!del.empty()) return TamperSpec::Delete(std::stoull(del));
    if (!replace.empty()) {
      const auto colon = replace.find(':');
      if (colon == std::string::npos) throw UsageError("use INDEX:VALUE");
      return TamperSpec::Replace(std::stoull(replace.substr(0, colon)),
                                 std::stoull(replace.substr(colon + 1)));
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad tamper specification");
  }
  return TamperSpec::None();
}

void Summarize(const GameReport& r) {
  std::cerr << r.adversary_name << ": trials=" << r.trials
            << " faulted=" << r.faulted << " maxAdvEq2=" << r.max_adv_eq2
            << " maxAdvEq3=" << r.max_adv_eq3 << "\n";
}

int Main(int argc, char** argv) {
  CLI::App app{"decorr: multi-program instruction decorrelation lab"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::string out;

  // assemble
  auto* assemble = app.add_subcommand("assemble", "Check a .dasm file and print it canonically");
  std::string asm_file;
  assemble->add_option("file", asm_file, "Program source")->required();
  assemble->add_option("--out", out, "Output path (default stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random straight-line program");
  GenSpec gen_spec;
  std::string weights;
  gen->add_option("--size", gen_spec.size, "Instruction count")->required();
  gen->add_option("--inputs", gen_spec.num_inputs, "Input cells");
  gen->add_option("--outputs", gen_spec.num_outputs, "Output cells");
  gen->add_option("--weights", weights, "Opcode weights, e.g. CONST=1,ADD=3");
  gen->add_option("--seed", seed, "Seed")->capture_default_str();
  gen->add_option("--out", out, "Output path (default stdout)");

  // obfuscate
  auto* obf = app.add_subcommand("obfuscate", "Merge programs into one bundle");
  std::vector<std::string> program_files;
  std::uint32_t lambda = 8;
  bool encode = false, strip = false;
  std::string out_bundle, out_witness;
  obf->add_option("files", program_files, "Program sources")->required();
  obf->add_option("--lambda", lambda, "Security parameter")->capture_default_str();
  obf->add_option("--seed", seed, "Seed")->capture_default_str();
  obf->add_flag("--encode", encode, "Enable tamper-resistant output encoding");
  obf->add_flag("--strip", strip, "Omit the secret section");
  obf->add_option("--out-bundle", out_bundle, "Bundle path (default stdout)");
  obf->add_option("--out-witness", out_witness, "Witness path");

  // run
  auto* run = app.add_subcommand("run", "Execute a bundle or a program");
  std::string bundle_file, program_file, inputs_file, trace_file;
  std::string tamper_delete, tamper_replace;
  bool no_key = false;
  auto* run_bundle = run->add_option("--bundle", bundle_file, "Bundle JSON");
  auto* run_program = run->add_option("--program", program_file, "Program .dasm");
  run_bundle->excludes(run_program);
  run->add_option("--inputs", inputs_file, "Inputs JSON [[...], ...]");
  run->add_option("--tamper-delete", tamper_delete, "Delete instruction INDEX");
  run->add_option("--tamper-replace", tamper_replace, "Replace write INDEX:VALUE");
  run->add_flag("--no-key", no_key, "Run as an evaluator without the key");
  run->add_option("--trace", trace_file, "Write the step trace here");
  run->add_option("--out", out, "Output path (default stdout)");

  // game / attack
  auto* game = app.add_subcommand("game", "Run a distinguishing game");
  auto* attack = app.add_subcommand("attack", "Run the delete-and-diff tampering attack");
  std::string witness_file, adversary_name = "random", z_text;
  std::uint64_t trials = 1000, min_trials = 1000;
  std::uint32_t target = 0;
  for (auto* cmd : {game, attack}) {
    cmd->add_option("--bundle", bundle_file, "Bundle JSON")->required();
    cmd->add_option("--witness", witness_file, "Witness JSON")->required();
    cmd->add_option("--inputs", inputs_file, "Fixed inputs for tampering");
    cmd->add_option("--trials", trials, "Trial count")->capture_default_str();
    cmd->add_option("--min-trials", min_trials, "Smallest accepted trial count")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Seed")->capture_default_str();
    cmd->add_option("--z", z_text, "Auxiliary input bytes");
    cmd->add_option("--out", out, "Output path (default stdout)");
  }
  game->add_option("--adversary", adversary_name, "Adversary")
      ->check(CLI::IsMember({"random", "syntactic", "dataflow", "tamper", "oracle"}))
      ->capture_default_str();
  game->add_option("--target", target, "Target program for the oracle adversary");

  // vcp
  auto* setup = app.add_subcommand("vcp-setup", "Verifier: hide a challenge next to f");
  std::size_t challenge_size = 8;
  std::string x_list, out_vm, out_state, out_request;
  setup->add_option("--program", program_file, "f as .dasm")->required();
  setup->add_option("--lambda", lambda, "Security parameter")->capture_default_str();
  setup->add_option("--seed", seed, "Seed")->capture_default_str();
  setup->add_option("--challenge-size", challenge_size, "Instructions in c")
      ->capture_default_str();
  setup->add_option("--x", x_list, "Comma-separated inputs for f");
  setup->add_option("--out-bundle", out_bundle, "Published bundle (default stdout)");
  setup->add_option("--out-vm", out_vm, "Sealed VM image for the prover")->required();
  setup->add_option("--out-state", out_state, "Verifier state")->required();
  setup->add_option("--out-request", out_request, "Compute request")->required();

  auto* prove = app.add_subcommand("vcp-prove", "Prover: execute the bundle");
  std::string vm_file, request_file, cheat = "none";
  prove->add_option("--vm", vm_file, "Sealed VM image")->required();
  prove->add_option("--request", request_file, "Compute request")->required();
  prove->add_option("--cheat", cheat, "none | lazy | delete:INDEX")->capture_default_str();
  prove->add_option("--seed", seed, "Seed for the lazy cheat")->capture_default_str();
  prove->add_option("--out", out, "Output path (default stdout)");

  auto* verify = app.add_subcommand("vcp-verify", "Verifier: check a response");
  std::string state_file, response_file;
  verify->add_option("--state", state_file, "Verifier state (consumed on use)")->required();
  verify->add_option("--request", request_file, "Compute request")->required();
  verify->add_option("--response", response_file, "Compute response")->required();
  verify->add_option("--out", out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*assemble) {
    const Program p = ParseProgram(ReadFile(asm_file));
    RequireValid(p);
    WriteOut(out, PrintProgram(p));
    std::cerr << "ok: " << p.size() << " instructions\n";
  } else if (*gen) {
    if (!weights.empty()) gen_spec.opcode_weights = ParseWeights(weights);
    gen_spec.seed = seed;
    WriteOut(out, PrintProgram(GenerateProgram(gen_spec)));
  } else if (*obf) {
    std::vector<Program> programs;
    for (const auto& file : program_files) {
      programs.push_back(ParseProgram(ReadFile(file)));
    }
    auto result = Obfuscate(programs, lambda, seed, encode);
    if (strip) result.bundle = StripSecrets(result.bundle);
    WriteOut(out_bundle, BundleToJson(result.bundle));
    if (!out_witness.empty()) WriteOut(out_witness, WitnessToJson(result.witness));
    std::cerr << "n=" << result.bundle.n << " stream=" << result.bundle.size()
              << " addrSpace=" << result.bundle.addr_space << "\n";
  } else if (*run) {
    if (bundle_file.empty() && program_file.empty()) {
      throw UsageError("run needs --bundle or --program");
    }
    ExecOptions options;
    options.trace = !trace_file.empty();
    Outcome outcome;
    if (!program_file.empty()) {
      const Program p = ParseProgram(ReadFile(program_file));
      std::vector<Word> inputs;
      if (!inputs_file.empty()) {
        const auto lists = WordListsFromJson(ReadFile(inputs_file));
        if (lists.size() != 1) throw Error(ErrorCode::kArity, "expected [[...]]");
        inputs = lists[0];
      }
      outcome = Execute(p, inputs, options);
    } else {
      const ObfBundle bundle = BundleFromJson(ReadFile(bundle_file));
      const Outputs inputs = inputs_file.empty()
                                 ? Outputs(bundle.n)
                                 : WordListsFromJson(ReadFile(inputs_file));
      std::optional<Word> key;
      if (bundle.secret && !no_key) key = bundle.secret->key;
      outcome = ExecuteBundle(bundle, inputs,
                              ParseTamper(tamper_delete, tamper_replace), key,
                              options);
    }
    if (outcome.trace) {
      WriteOut(trace_file, FormatTrace(*outcome.trace));
      outcome.trace.reset();
    }
    WriteOut(out, OutcomeToJson(outcome));
  } else if (*game || *attack) {
    const ObfBundle bundle = BundleFromJson(ReadFile(bundle_file));
    const Witness witness = WitnessFromJson(ReadFile(witness_file));
    const Outputs inputs = inputs_file.empty()
                               ? RandomInputs(bundle, seed)
                               : WordListsFromJson(ReadFile(inputs_file));
    const VmAccess vm(bundle);
    const ObfBundle view = StripSecrets(bundle);
    auto adversary = MakeAdversary(*attack ? "tamper" : adversary_name, &vm,
                                   &inputs, &witness, target);
    GameOptions options;
    options.workers = WorkerCount();
    options.min_trials = min_trials;
    const GameReport report =
        RunGame(view, witness, *adversary, AuxInput{z_text}, trials, seed, options);
    WriteOut(out, GameReportToJson(report));
    Summarize(report);
  } else if (*setup) {
    const Program f = ParseProgram(ReadFile(program_file));
    VcpSetup s = VerifierSetup(f, lambda, seed, challenge_size);
    const ComputeRequest request = MakeRequest(s.state, ParseWordList(x_list));
    WriteOut(out_bundle, BundleToJson(s.published));
    WriteOut(out_vm, BundleToJson(s.vm_image));
    WriteOut(out_state, VerifierStateToJson(s.state));
    WriteOut(out_request, RequestToJson(request));
    std::cerr << "published bundle: n=2 stream=" << s.published.size()
              << " challenge=" << s.state.challenge.size() << " instructions\n";
  } else if (*prove) {
    const VmAccess vm(BundleFromJson(ReadFile(vm_file)));
    const ComputeRequest request = RequestFromJson(ReadFile(request_file));
    ComputeResponse response;
    if (cheat == "none") {
      response = Prove(vm, request);
    } else if (cheat == "lazy") {
      SplitMix64 rng(seed);
      response.digest = rng();
      for (const auto& cells : vm.view().output_map) {
        std::vector<Word> row;
        for (std::size_t k = 0; k < cells.size(); ++k) row.push_back(rng());
        response.outputs.push_back(std::move(row));
      }
    } else if (cheat.rfind("delete:", 0) == 0) {
      const TamperSpec tamper = ParseTamper(cheat.substr(7), "");
      const Outcome o = vm.Run(Outputs{request.x, request.a}, tamper);
      response.digest = o.digest;
      response.outputs = o.encoded_outputs ? *o.encoded_outputs
                                           : o.outputs.value_or(Outputs{});
    } else {
      throw UsageError("--cheat must be none, lazy or delete:INDEX");
    }
    WriteOut(out, ResponseToJson(response));
  } else if (*verify) {
    VerifierState state = VerifierStateFromJson(ReadFile(state_file));
    const ComputeRequest request = RequestFromJson(ReadFile(request_file));
    const ComputeResponse response = ResponseFromJson(ReadFile(response_file));
    const Verdict verdict = Verify(state, request, response);
    WriteOut(state_file, VerifierStateToJson(state));
    WriteOut(out, VerdictToJson(verdict));
    std::cerr << (verdict.accepted ? "accept" : "reject: " + verdict.reason)
              << "\n";
    if (!verdict.accepted) throw Rejected{};
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const Rejected&) {
    return kExitDomain;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const decorr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
