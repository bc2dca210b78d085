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

#include "msdp/protocol.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "numerics.h"
#include "parallel.h"

namespace msdp {
namespace {

using Json = nlohmann::ordered_json;

constexpr int64_t kSessionBatch = 4096;

absl::Status WireError(const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat("malformed message: ", what));
}

bool HasOnlyKeys(const Json& j, std::initializer_list<std::string_view> keys) {
  if (j.size() != keys.size()) return false;
  for (std::string_view key : keys) {
    if (!j.contains(std::string(key))) return false;
  }
  return true;
}

// Samples n first-coordinate responses for user u into out[0..n).
void SampleFirstResults(const MechanismConfig& mech, double u, int64_t n,
                        uint64_t seed, int threads, std::vector<double>* out) {
  const Domain& dom = mech.domain();
  const double a0 = mech.offsets.front();
  out->resize(n);
  const int64_t batches = (n + kSessionBatch - 1) / kSessionBatch;
  internal::ParallelFor(batches, threads, [&](int64_t b) {
    Rng rng(ChildSeed(seed, static_cast<uint64_t>(b)));
    const int64_t end = std::min(n, (b + 1) * kSessionBatch);
    for (int64_t i = b * kSessionBatch; i < end; ++i) {
      const double signal = dom.Wrap(u + mech.noise.Sample(rng));
      (*out)[i] = dom.Wrap(signal + a0);
    }
  });
}

}  // namespace

absl::StatusOr<SignalMsg> ClientSignal(uint64_t session_id, double u,
                                       const MechanismConfig& mech, Rng& rng) {
  const Domain& dom = mech.domain();
  if (!std::isfinite(u) ||
      (dom.is_ring() && (u < 0.0 || u >= dom.circumference()))) {
    return absl::InvalidArgumentError(
        absl::StrFormat("DomainMismatch: user value %g outside the domain", u));
  }
  return SignalMsg{session_id, dom.kind(), dom.Wrap(u + mech.noise.Sample(rng))};
}

absl::StatusOr<ResponseMsg> ServerRespond(const SignalMsg& msg,
                                          const MechanismConfig& mech) {
  const Domain& dom = mech.domain();
  if (msg.domain != dom.kind()) {
    return absl::InvalidArgumentError(
        "DomainMismatch: signal domain differs from the mechanism");
  }
  ResponseMsg resp{msg.session_id, {}};
  resp.results.reserve(mech.offsets.size());
  for (double a : mech.offsets.values()) {
    resp.results.push_back(dom.Wrap(msg.signal + a));
  }
  return resp;
}

SelectionRecord PickBest(double u, const ResponseMsg& resp,
                         const DisutilityFn& h, const Domain& domain) {
  const NearestPoint nearest = FindNearest(domain, resp.results, u);
  return SelectionRecord{resp.session_id, u,
                         std::numeric_limits<double>::quiet_NaN(),
                         resp.results, nearest.index, h(nearest.distance)};
}

std::string Serialize(const SignalMsg& msg) {
  Json j;
  j["t"] = "sig";
  j["sid"] = msg.session_id;
  j["dom"] = msg.domain == Domain::Kind::kRing ? "ring" : "line";
  j["x"] = msg.signal;
  return j.dump();
}

std::string Serialize(const ResponseMsg& msg) {
  Json j;
  j["t"] = "resp";
  j["sid"] = msg.session_id;
  j["rs"] = msg.results;
  return j.dump();
}

std::string Serialize(const SelectionRecord& rec) {
  Json j;
  j["t"] = "sel";
  j["sid"] = rec.session_id;
  j["u"] = rec.user_value;
  j["x"] = rec.signal;
  j["rs"] = rec.results;
  j["i"] = rec.chosen_index;
  j["d"] = rec.disutility;
  return j.dump();
}

absl::StatusOr<WireMessage> ParseWireMessage(std::string_view line,
                                             size_t expected_k) {
  const Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return WireError("not a JSON object");
  if (!j.contains("t") || !j["t"].is_string()) return WireError("missing type");
  if (!j.contains("sid") || !j["sid"].is_number_unsigned()) {
    return WireError("missing or invalid sid");
  }
  const uint64_t sid = j["sid"].get<uint64_t>();
  const std::string type = j["t"].get<std::string>();
  if (type == "sig") {
    if (!HasOnlyKeys(j, {"t", "sid", "dom", "x"})) {
      return WireError("signal fields");
    }
    if (!j["dom"].is_string() || !j["x"].is_number()) {
      return WireError("signal field types");
    }
    const std::string dom = j["dom"].get<std::string>();
    const double x = j["x"].get<double>();
    if (!std::isfinite(x)) return WireError("non-finite signal");
    if (dom == "line") return SignalMsg{sid, Domain::Kind::kLine, x};
    if (dom == "ring") {
      if (x < 0.0 || x >= kTwoPi) return WireError("ring signal out of range");
      return SignalMsg{sid, Domain::Kind::kRing, x};
    }
    return WireError(absl::StrCat("unknown domain \"", dom, "\""));
  }
  if (type == "resp") {
    if (!HasOnlyKeys(j, {"t", "sid", "rs"}) || !j["rs"].is_array()) {
      return WireError("response fields");
    }
    if (j["rs"].size() != expected_k) {
      return WireError(absl::StrFormat("expected %d results, got %d",
                                       expected_k, j["rs"].size()));
    }
    ResponseMsg resp{sid, {}};
    for (const Json& r : j["rs"]) {
      if (!r.is_number()) return WireError("non-numeric result");
      resp.results.push_back(r.get<double>());
    }
    return resp;
  }
  return WireError(absl::StrCat("unknown type \"", type, "\""));
}

absl::StatusOr<AuditResult> EmpiricalPrivacyAudit(const MechanismConfig& mech,
                                                  double u1, double u2,
                                                  int64_t n, int bins,
                                                  uint64_t seed, int threads) {
  if (bins < 2 || n < static_cast<int64_t>(bins) * 50) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need bins >= 2 and n >= 50 * bins, got n = %d, bins = %d", n, bins));
  }
  const Domain& dom = mech.domain();
  std::vector<double> s1;
  std::vector<double> s2;
  SampleFirstResults(mech, dom.Wrap(u1), n, ChildSeed(seed, 0), threads, &s1);
  SampleFirstResults(mech, dom.Wrap(u2), n, ChildSeed(seed, 1), threads, &s2);
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());

  std::vector<double> pooled;
  pooled.reserve(2 * n);
  std::merge(s1.begin(), s1.end(), s2.begin(), s2.end(),
             std::back_inserter(pooled));
  std::vector<double> edges;
  for (int b = 1; b < bins; ++b) {
    edges.push_back(pooled[static_cast<size_t>(2 * n * b / bins)]);
  }
  auto counts = [&edges](const std::vector<double>& s) {
    std::vector<int64_t> c;
    auto it = s.begin();
    for (double e : edges) {
      auto next = std::lower_bound(it, s.end(), e);
      c.push_back(next - it);
      it = next;
    }
    c.push_back(s.end() - it);
    return c;
  };
  const std::vector<int64_t> c1 = counts(s1);
  const std::vector<int64_t> c2 = counts(s2);

  AuditResult result;
  result.min_count = std::numeric_limits<int64_t>::max();
  result.max_log_ratio = 0.0;
  for (size_t b = 0; b < c1.size(); ++b) {
    result.min_count = std::min({result.min_count, c1[b], c2[b]});
  }
  if (result.min_count < 50) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "InsufficientCounts: smallest bin holds %d samples", result.min_count));
  }
  for (size_t b = 0; b < c1.size(); ++b) {
    result.max_log_ratio =
        std::max(result.max_log_ratio,
                 std::fabs(std::log(static_cast<double>(c1[b]) / c2[b])));
  }
  result.bound = mech.metric == PrivacyMetric::kLocal
                     ? mech.eps
                     : mech.eps * dom.Distance(u1, u2);
  result.slack = 3.0 * std::sqrt(2.0 / result.min_count);
  result.within_bound = result.max_log_ratio <= result.bound + result.slack;
  return result;
}

absl::StatusOr<CostEstimate> Simulate(const MechanismConfig& mech, int64_t n,
                                      uint64_t seed, int threads,
                                      std::ostream* log) {
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need at least 2 sessions, got %d", n));
  }
  const Domain& dom = mech.domain();
  const int64_t batches = (n + kSessionBatch - 1) / kSessionBatch;
  // Batches run in rounds so that at most one round of log text is held.
  const int64_t round = 16 * static_cast<int64_t>(std::max(threads, 1));
  numerics::CompensatedSum sum;
  numerics::CompensatedSum sq;
  for (int64_t first = 0; first < batches; first += round) {
    const int64_t count = std::min(round, batches - first);
    std::vector<double> sums(count);
    std::vector<double> squares(count);
    std::vector<std::string> logs(log != nullptr ? count : 0);
    std::vector<absl::Status> errors(count);
    internal::ParallelFor(count, threads, [&](int64_t j) {
      const int64_t b = first + j;
      numerics::CompensatedSum batch_sum;
      numerics::CompensatedSum batch_sq;
      const int64_t end = std::min(n, (b + 1) * kSessionBatch);
      for (int64_t i = b * kSessionBatch; i < end; ++i) {
        const uint64_t sid = static_cast<uint64_t>(i);
        Rng rng(ChildSeed(seed, sid));
        const double u = dom.is_ring() ? rng.Uniform(0.0, dom.circumference())
                                       : rng.Uniform(-10.0, 10.0);
        absl::StatusOr<SignalMsg> sig = ClientSignal(sid, u, mech, rng);
        if (!sig.ok()) {
          errors[j] = sig.status();
          return;
        }
        absl::StatusOr<ResponseMsg> resp = ServerRespond(*sig, mech);
        if (!resp.ok()) {
          errors[j] = resp.status();
          return;
        }
        SelectionRecord rec = PickBest(u, *resp, mech.h, dom);
        rec.signal = sig->signal;
        batch_sum.Add(rec.disutility);
        batch_sq.Add(rec.disutility * rec.disutility);
        if (log != nullptr) {
          std::string& out = logs[j];
          out += Serialize(*sig);
          out += '\n';
          out += Serialize(*resp);
          out += '\n';
          out += Serialize(rec);
          out += '\n';
        }
      }
      sums[j] = batch_sum.Total();
      squares[j] = batch_sq.Total();
    });
    for (const absl::Status& s : errors) {
      if (!s.ok()) return s;
    }
    for (int64_t j = 0; j < count; ++j) {
      sum.Add(sums[j]);
      sq.Add(squares[j]);
      if (log != nullptr) *log << logs[j];
    }
  }
  const double nd = static_cast<double>(n);
  const double mean = sum.Total() / nd;
  const double var =
      std::max(0.0, (sq.Total() - nd * mean * mean) / (nd - 1.0));
  return CostEstimate{mean, std::sqrt(var / nd), n};
}

}  // namespace msdp
