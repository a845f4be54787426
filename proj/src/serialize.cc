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

#include "decorr/serialize.h"

#include <json.hpp>

namespace decorr {
namespace {

using Json = nlohmann::ordered_json;

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

template <typename Fn>
auto Guard(std::string_view what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string(what) + ": " + e.what());
  }
}

Json Parse(std::string_view text, std::string_view what) {
  return Guard(what, [&] { return Json::parse(text); });
}

std::uint64_t U64(const Json& j, std::string_view field) {
  if (!j.is_number_unsigned()) {
    throw Error(ErrorCode::kFormat,
                std::string(field) + " must be an unsigned integer");
  }
  return j.get<std::uint64_t>();
}

Addr AddrOf(const Json& j, std::string_view field) {
  const auto v = U64(j, field);
  if (v > 0xFFFFFFFFULL) {
    throw Error(ErrorCode::kFormat, std::string(field) + " out of range");
  }
  return static_cast<Addr>(v);
}

std::vector<Word> Words(const Json& j, std::string_view field) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kFormat, std::string(field) + " must be an array");
  }
  std::vector<Word> out;
  for (const auto& v : j) out.push_back(U64(v, field));
  return out;
}

Outputs WordLists(const Json& j, std::string_view field) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kFormat, std::string(field) + " must be an array");
  }
  Outputs out;
  for (const auto& row : j) out.push_back(Words(row, field));
  return out;
}

std::vector<std::vector<Addr>> AddrLists(const Json& j,
                                         std::string_view field) {
  std::vector<std::vector<Addr>> out;
  for (const auto& row : WordLists(j, field)) {
    std::vector<Addr> cells;
    for (Word w : row) {
      if (w > 0xFFFFFFFFULL) {
        throw Error(ErrorCode::kFormat, std::string(field) + " out of range");
      }
      cells.push_back(static_cast<Addr>(w));
    }
    out.push_back(std::move(cells));
  }
  return out;
}

bool Bool(const Json& j, std::string_view field) {
  if (!j.is_boolean()) {
    throw Error(ErrorCode::kFormat, std::string(field) + " must be a boolean");
  }
  return j.get<bool>();
}

double Number(const Json& j, std::string_view field) {
  if (!j.is_number()) {
    throw Error(ErrorCode::kFormat, std::string(field) + " must be a number");
  }
  return j.get<double>();
}

std::string String(const Json& j, std::string_view field) {
  if (!j.is_string()) {
    throw Error(ErrorCode::kFormat, std::string(field) + " must be a string");
  }
  return j.get<std::string>();
}

}  // namespace

std::string BundleToJson(const ObfBundle& b) {
  Json j;
  j["version"] = 1;
  j["lambda"] = b.lambda;
  j["n"] = b.n;
  j["addrSpace"] = b.addr_space;
  j["inputMap"] = b.input_map;
  j["outputMap"] = b.output_map;
  j["encodingEnabled"] = b.encoding_enabled;
  j["digestSeed"] = b.digest_seed;
  j["sizeBoundQ"] = Json{{"c1", b.size_bound.c1}, {"c2", b.size_bound.c2}};
  Json stream = Json::array();
  for (const auto& ins : b.instructions) {
    Json row;
    row["op"] = std::string(OpcodeName(ins.op));
    row["d"] = ins.dst;
    row["a"] = ins.a;
    if (SourceCount(ins.op) == 2) row["b"] = ins.b;
    stream.push_back(std::move(row));
  }
  j["instructions"] = std::move(stream);
  if (b.secret) j["secret"] = Json{{"key", b.secret->key}};
  return Dump(j);
}

ObfBundle BundleFromJson(std::string_view text) {
  const Json j = Parse(text, "bundle");
  return Guard("bundle", [&] {
    if (!j.is_object()) throw Error(ErrorCode::kFormat, "bundle must be an object");
    if (U64(j.at("version"), "version") != 1) {
      throw Error(ErrorCode::kFormat, "unsupported bundle version");
    }
    ObfBundle b;
    b.lambda = static_cast<std::uint32_t>(AddrOf(j.at("lambda"), "lambda"));
    b.n = static_cast<std::uint32_t>(AddrOf(j.at("n"), "n"));
    b.addr_space = AddrOf(j.at("addrSpace"), "addrSpace");
    b.input_map = AddrLists(j.at("inputMap"), "inputMap");
    b.output_map = AddrLists(j.at("outputMap"), "outputMap");
    b.encoding_enabled = Bool(j.at("encodingEnabled"), "encodingEnabled");
    b.digest_seed = U64(j.at("digestSeed"), "digestSeed");
    const auto& q = j.at("sizeBoundQ");
    b.size_bound = {U64(q.at("c1"), "c1"), U64(q.at("c2"), "c2")};
    if (b.input_map.size() != b.n || b.output_map.size() != b.n) {
      throw Error(ErrorCode::kFormat, "inputMap/outputMap length != n");
    }
    const auto& stream = j.at("instructions");
    if (!stream.is_array()) {
      throw Error(ErrorCode::kFormat, "instructions must be an array");
    }
    for (const auto& row : stream) {
      const auto op = OpcodeFromName(String(row.at("op"), "op"));
      if (!op) throw Error(ErrorCode::kFormat, "unknown opcode in bundle");
      Instruction ins;
      ins.op = *op;
      ins.dst = AddrOf(row.at("d"), "d");
      ins.a = U64(row.at("a"), "a");
      const bool has_b = row.contains("b");
      if (SourceCount(*op) == 2) {
        if (!has_b) throw Error(ErrorCode::kFormat, "binary op missing b");
        ins.b = AddrOf(row.at("b"), "b");
      } else if (has_b) {
        throw Error(ErrorCode::kFormat, "unary op carries b");
      }
      b.instructions.push_back(ins);
    }
    if (j.contains("secret")) {
      b.secret = SecretSection{U64(j.at("secret").at("key"), "key")};
    }
    return b;
  });
}

std::string WitnessToJson(const Witness& w) {
  Json j;
  j["origin"] = w.origin;
  Json cells = Json::object();
  for (std::size_t a = 0; a < w.cell_origin.size(); ++a) {
    cells[std::to_string(a)] = w.cell_origin[a];
  }
  j["cellOrigin"] = std::move(cells);
  return Dump(j);
}

Witness WitnessFromJson(std::string_view text) {
  const Json j = Parse(text, "witness");
  return Guard("witness", [&] {
    Witness w;
    for (const auto& v : j.at("origin")) {
      w.origin.push_back(static_cast<std::uint32_t>(AddrOf(v, "origin")));
    }
    const auto& cells = j.at("cellOrigin");
    if (!cells.is_object()) {
      throw Error(ErrorCode::kFormat, "cellOrigin must be an object");
    }
    w.cell_origin.assign(cells.size(), kScratchOrigin - 1);
    for (const auto& [key, value] : cells.items()) {
      std::size_t addr = 0;
      try {
        std::size_t used = 0;
        addr = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kFormat, "bad cellOrigin key '" + key + "'");
      }
      if (addr >= w.cell_origin.size() || !value.is_number_integer() ||
          value.get<std::int64_t>() < kScratchOrigin) {
        throw Error(ErrorCode::kFormat, "bad cellOrigin entry '" + key + "'");
      }
      w.cell_origin[addr] = static_cast<std::int32_t>(value.get<std::int64_t>());
    }
    for (auto v : w.cell_origin) {
      if (v < kScratchOrigin) {
        throw Error(ErrorCode::kFormat, "cellOrigin does not cover [0, A)");
      }
    }
    return w;
  });
}

std::string OutcomeToJson(const Outcome& o) {
  Json j;
  if (o.outputs) j["outputs"] = *o.outputs;
  if (o.encoded_outputs) j["encodedOutputs"] = *o.encoded_outputs;
  j["digest"] = o.digest;
  j["steps"] = o.steps;
  if (o.trace) {
    Json rows = Json::array();
    for (const auto& e : *o.trace) rows.push_back({e.index, e.dst, e.value});
    j["trace"] = std::move(rows);
  }
  return Dump(j);
}

std::string GameReportToJson(const GameReport& r) {
  Json j;
  j["adversaryName"] = r.adversary_name;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["faulted"] = r.faulted;
  j["streamLength"] = r.stream_length;
  j["maxAdvEq2"] = r.max_adv_eq2;
  j["maxAdvEq3"] = r.max_adv_eq3;
  Json programs = Json::array();
  for (std::size_t i = 0; i < r.programs.size(); ++i) {
    const auto& s = r.programs[i];
    Json p;
    p["i"] = i;
    p["members"] = s.members;
    p["estBothS"] = s.est_both_s;
    p["estBothJ"] = s.est_both_j;
    p["estSplit"] = s.est_split;
    p["baseBothS"] = s.base_both_s;
    p["baseBothJ"] = s.base_both_j;
    p["advEq2"] = s.adv_eq2;
    p["advEq3"] = s.adv_eq3;
    p["ci95"] = Json{{"bothS", s.ci95_both_s},
                     {"bothJ", s.ci95_both_j},
                     {"split", s.ci95_split}};
    p["counts"] = Json{{"bothS", s.count_both_s},
                       {"bothJ", s.count_both_j},
                       {"split", s.count_split}};
    programs.push_back(std::move(p));
  }
  j["programs"] = std::move(programs);
  return Dump(j);
}

GameReport GameReportFromJson(std::string_view text) {
  const Json j = Parse(text, "game report");
  return Guard("game report", [&] {
    GameReport r;
    r.adversary_name = String(j.at("adversaryName"), "adversaryName");
    r.seed = U64(j.at("seed"), "seed");
    r.trials = U64(j.at("trials"), "trials");
    r.faulted = U64(j.at("faulted"), "faulted");
    r.stream_length = U64(j.at("streamLength"), "streamLength");
    r.max_adv_eq2 = Number(j.at("maxAdvEq2"), "maxAdvEq2");
    r.max_adv_eq3 = Number(j.at("maxAdvEq3"), "maxAdvEq3");
    for (const auto& p : j.at("programs")) {
      ProgramScore s;
      s.members = U64(p.at("members"), "members");
      s.est_both_s = Number(p.at("estBothS"), "estBothS");
      s.est_both_j = Number(p.at("estBothJ"), "estBothJ");
      s.est_split = Number(p.at("estSplit"), "estSplit");
      s.base_both_s = Number(p.at("baseBothS"), "baseBothS");
      s.base_both_j = Number(p.at("baseBothJ"), "baseBothJ");
      s.adv_eq2 = Number(p.at("advEq2"), "advEq2");
      s.adv_eq3 = Number(p.at("advEq3"), "advEq3");
      s.ci95_both_s = Number(p.at("ci95").at("bothS"), "ci95");
      s.ci95_both_j = Number(p.at("ci95").at("bothJ"), "ci95");
      s.ci95_split = Number(p.at("ci95").at("split"), "ci95");
      s.count_both_s = U64(p.at("counts").at("bothS"), "counts");
      s.count_both_j = U64(p.at("counts").at("bothJ"), "counts");
      s.count_split = U64(p.at("counts").at("split"), "counts");
      r.programs.push_back(s);
    }
    return r;
  });
}

std::string RequestToJson(const ComputeRequest& request) {
  Json j;
  j["x"] = request.x;
  j["a"] = request.a;
  return Dump(j);
}

ComputeRequest RequestFromJson(std::string_view text) {
  const Json j = Parse(text, "request");
  return Guard("request", [&] {
    return ComputeRequest{Words(j.at("x"), "x"), Words(j.at("a"), "a")};
  });
}

std::string ResponseToJson(const ComputeResponse& response) {
  Json j;
  j["digest"] = response.digest;
  j["outputs"] = response.outputs;
  return Dump(j);
}

ComputeResponse ResponseFromJson(std::string_view text) {
  const Json j = Parse(text, "response");
  return Guard("response", [&] {
    ComputeResponse r;
    r.digest = U64(j.at("digest"), "digest");
    r.outputs = WordLists(j.at("outputs"), "outputs");
    return r;
  });
}

std::string VerdictToJson(const Verdict& verdict) {
  Json j;
  j["verdict"] = verdict.accepted ? "accept" : "reject";
  if (!verdict.accepted) j["reason"] = verdict.reason;
  if (verdict.accepted) j["fx"] = verdict.fx;
  return Dump(j);
}

std::string VerifierStateToJson(const VerifierState& s) {
  Json j;
  j["challenge"] = PrintProgram(s.challenge);
  j["challengeInput"] = s.challenge_input;
  j["key"] = s.key;
  j["bundleRef"] = s.bundle_ref;
  j["functionInputs"] = s.function_inputs;
  j["expectedOutputsShape"] = s.expected_outputs_shape;
  j["consumed"] = s.consumed;
  return Dump(j);
}

VerifierState VerifierStateFromJson(std::string_view text) {
  const Json j = Parse(text, "verifier state");
  return Guard("verifier state", [&] {
    VerifierState s;
    s.challenge = ParseProgram(String(j.at("challenge"), "challenge"));
    s.challenge_input = Words(j.at("challengeInput"), "challengeInput");
    s.key = U64(j.at("key"), "key");
    s.bundle_ref = U64(j.at("bundleRef"), "bundleRef");
    s.function_inputs = U64(j.at("functionInputs"), "functionInputs");
    for (const auto& v : j.at("expectedOutputsShape")) {
      s.expected_outputs_shape.push_back(U64(v, "expectedOutputsShape"));
    }
    s.consumed = Bool(j.at("consumed"), "consumed");
    return s;
  });
}

Outputs WordListsFromJson(std::string_view text) {
  const Json j = Parse(text, "inputs");
  return Guard("inputs", [&] { return WordLists(j, "inputs"); });
}

std::string WordListsToJson(const Outputs& lists) {
  return Dump(Json(lists));
}

Word HashBytes(std::string_view bytes) {
  Word h = Mix(0x6A09E667F3BCC908ULL, bytes.size());
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    Word w = 0;
    for (int k = 0; k < 8; ++k) {
      w |= static_cast<Word>(static_cast<unsigned char>(bytes[i + k])) << (8 * k);
    }
    h = Mix(h, w);
  }
  Word tail = 0;
  for (int k = 0; i < bytes.size(); ++i, ++k) {
    tail |= static_cast<Word>(static_cast<unsigned char>(bytes[i])) << (8 * k);
  }
  return Mix(h, tail);
}

}  // namespace decorr
