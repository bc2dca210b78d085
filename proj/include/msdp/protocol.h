//
// Copyright 2026 The msdp Authors.
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
//

// Client/server simulation of the multi-selection architecture: the client
// sends a noisy signal, the server answers with k results, and the client
// keeps the closest. Messages travel as newline-delimited JSON.

#ifndef MSDP_PROTOCOL_H_
#define MSDP_PROTOCOL_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "msdp/density.h"
#include "msdp/disutility.h"
#include "msdp/mechanism.h"
#include "msdp/oracle.h"
#include "msdp/rng.h"

namespace msdp {

struct SignalMsg {
  uint64_t session_id;
  Domain::Kind domain;
  double signal;

  friend bool operator==(const SignalMsg&, const SignalMsg&) = default;
};

struct ResponseMsg {
  uint64_t session_id;
  std::vector<double> results;

  friend bool operator==(const ResponseMsg&, const ResponseMsg&) = default;
};

struct SelectionRecord {
  uint64_t session_id;
  double user_value;
  double signal;
  std::vector<double> results;
  size_t chosen_index;
  double disutility;
};

using WireMessage = std::variant<SignalMsg, ResponseMsg>;

absl::StatusOr<SignalMsg> ClientSignal(uint64_t session_id, double u,
                                       const MechanismConfig& mech, Rng& rng);
absl::StatusOr<ResponseMsg> ServerRespond(const SignalMsg& msg,
                                          const MechanismConfig& mech);
// Closest result to u, ties to the smaller index.
SelectionRecord PickBest(double u, const ResponseMsg& resp,
                         const DisutilityFn& h, const Domain& domain);

// One JSON object per call, without the trailing newline.
std::string Serialize(const SignalMsg& msg);
std::string Serialize(const ResponseMsg& msg);
std::string Serialize(const SelectionRecord& rec);

// Rejects unknown message types, missing or extra fields, ring signals
// outside [0, 2 pi), and responses whose length differs from expected_k.
absl::StatusOr<WireMessage> ParseWireMessage(std::string_view line,
                                             size_t expected_k);

struct AuditResult {
  double max_log_ratio;
  // eps * d(u1, u2) for geographic mechanisms, eps for local ones.
  double bound;
  // 3 sqrt(2 / min_count).
  double slack;
  int64_t min_count;
  bool within_bound;
};

// Histograms the first result returned to users u1 and u2 over shared bins
// cut at quantiles of the pooled sample, and compares the largest
// |log(p1 / p2)| with the privacy bound.
absl::StatusOr<AuditResult> EmpiricalPrivacyAudit(const MechanismConfig& mech,
                                                  double u1, double u2,
                                                  int64_t n, int bins,
                                                  uint64_t seed,
                                                  int threads = 1);

// Runs n independent sessions. Session i draws its user value (uniform on
// [-10, 10] on the line, on [0, 2 pi) on the ring) and its noise from child
// stream i of `seed`. When `log` is set, every session appends its signal,
// response and selection lines in session order.
absl::StatusOr<CostEstimate> Simulate(const MechanismConfig& mech, int64_t n,
                                      uint64_t seed, int threads = 1,
                                      std::ostream* log = nullptr);

}  // namespace msdp

#endif  // MSDP_PROTOCOL_H_
