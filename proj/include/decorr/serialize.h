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

// JSON wire formats. All writers emit keys in a fixed order, two-space
// indentation and a trailing LF, so equal values serialize to equal bytes.
// Readers throw Error(kFormat) on anything malformed.

#ifndef DECORR_SERIALIZE_H_
#define DECORR_SERIALIZE_H_

#include <string>
#include <string_view>

#include "decorr/adversary.h"
#include "decorr/bundle.h"
#include "decorr/vcp.h"
#include "decorr/vm.h"

namespace decorr {

std::string BundleToJson(const ObfBundle& bundle);
ObfBundle BundleFromJson(std::string_view text);

std::string WitnessToJson(const Witness& witness);
Witness WitnessFromJson(std::string_view text);

std::string OutcomeToJson(const Outcome& outcome);

std::string GameReportToJson(const GameReport& report);
GameReport GameReportFromJson(std::string_view text);

std::string RequestToJson(const ComputeRequest& request);
ComputeRequest RequestFromJson(std::string_view text);

std::string ResponseToJson(const ComputeResponse& response);
ComputeResponse ResponseFromJson(std::string_view text);

std::string VerdictToJson(const Verdict& verdict);

std::string VerifierStateToJson(const VerifierState& state);
VerifierState VerifierStateFromJson(std::string_view text);

// Per-program input vectors: [[...], [...]].
Outputs WordListsFromJson(std::string_view text);
std::string WordListsToJson(const Outputs& lists);

// Mix-fold over bytes; identifies published bundles.
Word HashBytes(std::string_view bytes);

}  // namespace decorr

#endif  // DECORR_SERIALIZE_H_
