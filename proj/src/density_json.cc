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

#include "msdp/density_json.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "json.hpp"

namespace msdp {
namespace {

using nlohmann::ordered_json;

ordered_json EncodeBound(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return "-inf";
  if (x == std::numeric_limits<double>::infinity()) return "+inf";
  return x;
}

absl::StatusOr<double> DecodeNumber(const ordered_json& j, bool allow_inf) {
  if (j.is_number()) return j.get<double>();
  if (allow_inf && j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "+inf") return std::numeric_limits<double>::infinity();
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("Expected a number, got %s", j.dump()));
}

}  // namespace

std::string DensityToJson(const PiecewiseExpDensity& density) {
  ordered_json j;
  if (density.domain().is_ring()) {
    j["domain"] = {{"kind", "ring"},
                   {"circumference", density.domain().circumference()}};
  } else {
    j["domain"] = {{"kind", "line"}};
  }
  ordered_json segments = ordered_json::array();
  for (const ExpSegment& s : density.segments()) {
    segments.push_back({{"lo", EncodeBound(s.lo)},
                        {"hi", EncodeBound(s.hi)},
                        {"log_coeff", s.log_coeff},
                        {"rate", s.rate}});
  }
  j["segments"] = std::move(segments);
  ordered_json jumps = ordered_json::array();
  for (size_t b : density.jump_breakpoints()) jumps.push_back(b);
  j["flags"] = {{"jumps", std::move(jumps)}};
  return j.dump();
}

absl::StatusOr<PiecewiseExpDensity> DensityFromJson(std::string_view text) {
  ordered_json j = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("Density JSON is malformed");
  }
  if (!j.contains("domain") || !j.contains("segments")) {
    return absl::InvalidArgumentError("Density JSON needs domain and segments");
  }
  const ordered_json& dom = j["domain"];
  Domain domain = Domain::Line();
  if (!dom.is_object() || !dom.contains("kind")) {
    return absl::InvalidArgumentError("Density JSON domain needs a kind");
  }
  if (dom["kind"] == "ring") {
    if (!dom.contains("circumference")) {
      return absl::InvalidArgumentError("Ring domain needs a circumference");
    }
    absl::StatusOr<double> c = DecodeNumber(dom["circumference"], false);
    if (!c.ok()) return c.status();
    domain = Domain::Ring(*c);
  } else if (dom["kind"] != "line") {
    return absl::InvalidArgumentError("Domain kind must be line or ring");
  }
  std::vector<ExpSegment> segments;
  if (!j["segments"].is_array()) {
    return absl::InvalidArgumentError("segments must be an array");
  }
  for (const ordered_json& s : j["segments"]) {
    if (!s.is_object() || !s.contains("lo") || !s.contains("hi") ||
        !s.contains("log_coeff") || !s.contains("rate")) {
      return absl::InvalidArgumentError(
          "Each segment needs lo, hi, log_coeff and rate");
    }
    absl::StatusOr<double> lo = DecodeNumber(s["lo"], true);
    absl::StatusOr<double> hi = DecodeNumber(s["hi"], true);
    absl::StatusOr<double> lc = DecodeNumber(s["log_coeff"], false);
    absl::StatusOr<double> rate = DecodeNumber(s["rate"], false);
    for (const auto* v : {&lo, &hi, &lc, &rate}) {
      if (!v->ok()) return v->status();
    }
    segments.push_back({*lo, *hi, *lc, *rate});
  }
  std::vector<size_t> jumps;
  if (j.contains("flags")) {
    const ordered_json& flags = j["flags"];
    if (!flags.is_object()) {
      return absl::InvalidArgumentError("flags must be an object");
    }
    if (flags.contains("jumps")) {
      if (!flags["jumps"].is_array()) {
        return absl::InvalidArgumentError("flags.jumps must be an array");
      }
      for (const ordered_json& b : flags["jumps"]) {
        if (!b.is_number_unsigned()) {
          return absl::InvalidArgumentError(
              "flags.jumps entries must be breakpoint indices");
        }
        jumps.push_back(b.get<size_t>());
      }
    }
  }
  return PiecewiseExpDensity::Create(domain, std::move(segments),
                                     std::move(jumps));
}

}  // namespace msdp
