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

#include "msdp/cli.h"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "msdp/density.h"
#include "msdp/density_json.h"
#include "msdp/disutility.h"
#include "msdp/dual.h"
#include "msdp/line_mech.h"
#include "msdp/mechanism.h"
#include "msdp/mhr.h"
#include "msdp/oracle.h"
#include "msdp/protocol.h"
#include "msdp/ring_mech.h"
#include "openssl/evp.h"

namespace msdp::cli {
namespace {

using Json = nlohmann::ordered_json;

uint64_t DefaultSeed() {
  const char* env = std::getenv("MSDP_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  return *end == '\0' ? v : 1;
}

std::string HexDigest(const unsigned char* md, unsigned int len) {
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) absl::StrAppendFormat(&hex, "%02x", md[i]);
  return hex;
}

absl::StatusOr<std::string> Sha256OfFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  return HexDigest(md, len);
}

// "dir/name.json" -> "dir/name" + suffix.
std::string Sibling(const std::string& path, const std::string& suffix) {
  const size_t slash = path.find_last_of('/');
  const size_t dot = path.find_last_of('.');
  const bool has_ext =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

// Collects every file a command writes and records them in a manifest next
// to the primary output.
class Outputs {
 public:
  Outputs(std::ostream& out, std::string command_line, uint64_t seed)
      : out_(out), command_line_(std::move(command_line)), seed_(seed) {}

  // Writes to `path`, or to the standard output stream when path is empty.
  absl::Status Write(const std::string& path, const std::string& content) {
    if (path.empty()) {
      out_ << content;
      return absl::OkStatus();
    }
    {
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      if (!f) return absl::InvalidArgumentError(absl::StrCat("cannot write ", path));
      f << content;
      if (!f) return absl::InternalError(absl::StrCat("write failed: ", path));
    }
    return Record(path);
  }

  // Adds a file that was written by other means.
  absl::Status Record(const std::string& path) {
    absl::StatusOr<std::string> digest = Sha256OfFile(path);
    if (!digest.ok()) return digest.status();
    files_.push_back({path, *digest});
    return absl::OkStatus();
  }

  absl::Status Finish(const std::string& primary) {
    if (primary.empty() || files_.empty()) return absl::OkStatus();
    Json m;
    m["command_line"] = command_line_;
    m["seed"] = seed_;
    m["tool_version"] = kToolVersion;
    Json list = Json::array();
    for (const auto& [path, digest] : files_) {
      Json e;
      e["path"] = path;
      e["sha256"] = digest;
      list.push_back(e);
    }
    m["outputs"] = list;
    std::ofstream f(primary + ".manifest.json", std::ios::trunc);
    if (!f) return absl::InvalidArgumentError("cannot write manifest");
    f << m.dump(2) << "\n";
    return absl::OkStatus();
  }

 private:
  std::ostream& out_;
  std::string command_line_;
  uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> files_;
};

int Fail(const absl::Status& s, std::ostream& err) {
  err << "msdp: " << s.message() << "\n";
  return s.code() == absl::StatusCode::kInvalidArgument ? kExitUsage
                                                        : kExitVerificationFailed;
}

Json OffsetsJson(const OffsetSet& a) {
  return Json(std::vector<double>(a.values().begin(), a.values().end()));
}

std::string Csv(const std::string& header,
                const std::vector<std::vector<double>>& columns) {
  std::string out = header + "\n";
  const size_t rows = columns.empty() ? 0 : columns.front().size();
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c) {
      absl::StrAppendFormat(&out, c == 0 ? "%.17g" : ",%.17g", columns[c][r]);
    }
    out += "\n";
  }
  return out;
}

struct Common {
  uint64_t seed = DefaultSeed();
  int threads = 1;
  std::string out;
};

void AddCommon(CLI::App* cmd, Common* c, const std::string& out_help) {
  cmd->add_option("--seed", c->seed, "Random seed (default: $MSDP_SEED or 1)");
  cmd->add_option("--threads", c->threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c->out, out_help);
}

absl::StatusOr<MechanismConfig> BuildMechanism(const std::string& kind,
                                               double eps, int k, int threads) {
  if (kind == "line") return MakeLineMechanism(eps, k);
  if (kind == "ring-local") return MakeRingLocalMechanism(eps, k);
  if (kind == "ring-geo") {
    if (k != 2) {
      return absl::InvalidArgumentError("ring-geo supports k = 2 only");
    }
    return MakeRingGeoMechanism(eps, 512, threads);
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown mechanism ", kind));
}

// ---- line ------------------------------------------------------------------

struct LineArgs {
  double eps = 1.0;
  int k = 1;
  std::string h = "identity";
  std::string method = "closed";
};

absl::StatusOr<int> RunLine(const LineArgs& a, const Common& c, Outputs& io) {
  absl::StatusOr<DisutilityFn> h = DisutilityFn::FromName(a.h);
  if (!h.ok()) return h.status();
  absl::StatusOr<MechanismConfig> mech = MakeLineMechanism(
      a.eps, a.k, *h,
      a.method == "closed" ? LineMethod::kClosed : LineMethod::kRecurrence);
  if (!mech.ok()) return mech.status();
  double cost;
  if (a.method == "closed" && h->is_identity()) {
    cost = *ClosedFormCost(a.eps, a.k);
  } else {
    cost = CertifiedCost(*mech);
  }
  Json j;
  j["eps"] = a.eps;
  j["k"] = a.k;
  j["h"] = h->name();
  j["method"] = a.method;
  j["offsets"] = OffsetsJson(mech->offsets);
  j["cost"] = cost;
  j["median_residual_max"] =
      MedianCondition(mech->noise, mech->offsets).MaxAbsResidual();
  if (absl::Status s = io.Write(c.out, j.dump(2) + "\n"); !s.ok()) return s;
  return kExitOk;
}

// ---- ring-local / ring-geo -------------------------------------------------

struct RingArgs {
  double eps = 1.0;
  int k = 1;
  int grid = 512;
  std::string csv;
};

absl::StatusOr<int> RunRingLocal(const RingArgs& a, const Common& c,
                                 Outputs& io) {
  absl::StatusOr<LocalRingResult> r = LocalRingMechanism(a.eps, a.k);
  if (!r.ok()) return r.status();
  const RingMechanism& m = r->mechanism;
  Json j;
  j["eps"] = a.eps;
  j["k"] = a.k;
  j["beta"] = m.beta;
  j["cell"] = m.cell;
  j["offsets"] = OffsetsJson(m.offsets);
  j["cost"] = r->cost;
  j["exact_cost"] =
      ExpectedMinDisutility(m.density, m.offsets, DisutilityFn::Identity());
  j["privacy_ok"] =
      CheckPrivacy(m.density, a.eps, PrivacyMetric::kLocal).satisfied;
  j["density"] = Json::parse(DensityToJson(m.density));
  if (absl::Status s = io.Write(c.out, j.dump(2) + "\n"); !s.ok()) return s;
  const std::string csv = !a.csv.empty() ? a.csv
                          : c.out.empty() ? std::string()
                                          : Sibling(c.out, ".csv");
  if (!csv.empty()) {
    if (absl::Status s = io.Write(csv, DensityCsv(m.density)); !s.ok()) return s;
  }
  return kExitOk;
}

absl::StatusOr<int> RunRingGeo(const RingArgs& a, const Common& c,
                               Outputs& io) {
  absl::StatusOr<GeoRingResult> r = GeoRingOptimizeK2(a.eps, a.grid, c.threads);
  if (!r.ok()) return r.status();
  absl::StatusOr<double> laplace = GeoRingLaplaceCostK2(a.eps);
  if (!laplace.ok()) return laplace.status();
  Json j;
  j["eps"] = a.eps;
  j["k"] = 2;
  j["t_star"] = r->t_star;
  j["cost"] = r->cost;
  j["laplace_cost"] = *laplace;
  j["offsets"] = OffsetsJson(r->offsets);
  j["privacy_ok"] =
      CheckPrivacy(r->density, a.eps, PrivacyMetric::kGeographic).satisfied;
  j["density"] = Json::parse(DensityToJson(r->density));
  if (absl::Status s = io.Write(c.out, j.dump(2) + "\n"); !s.ok()) return s;
  const std::string csv = !a.csv.empty() ? a.csv
                          : c.out.empty() ? std::string()
                                          : Sibling(c.out, ".csv");
  if (!csv.empty()) {
    if (absl::Status s = io.Write(csv, DensityCsv(r->density)); !s.ok()) return s;
  }
  return kExitOk;
}

// ---- mhr -------------------------------------------------------------------

struct MhrArgs {
  std::string dist = "exp";
  double eps = 1.0;
  int kmax = 64;
};

absl::StatusOr<int> RunMhr(const MhrArgs& a, const Common& c, Outputs& io) {
  const SurvivalFn f = a.dist == "exp" ? SurvivalFn::Exponential(a.eps)
                                       : SurvivalFn::HalfNormal(a.eps);
  std::vector<int> ks;
  for (int k = 1; k <= a.kmax; k *= 2) ks.push_back(k);
  absl::StatusOr<MhrBoundReport> report = MhrBoundCheck(f, ks);
  if (!report.ok()) return report.status();
  std::string csv = "K,phi,bound,ratio\n";
  for (const MhrBoundRow& row : report->rows) {
    absl::StrAppendFormat(&csv, "%d,%.17g,%.17g,%.17g\n", row.k, row.phi,
                          row.bound, row.ratio);
  }
  if (absl::Status s = io.Write(c.out, csv); !s.ok()) return s;
  return report->all_hold ? kExitOk : kExitVerificationFailed;
}

// ---- dual ------------------------------------------------------------------

struct DualArgs {
  double eps = 1.0;
  double zeta = 0.1;
  double lambda = 0.4;
  std::vector<double> v;
  double step = 1e-3;
  double r_max = 0.0;
};

Json TraceSummary(const DualProblem& p, const DualTrace& t) {
  Json j;
  j["eps"] = p.eps;
  j["zeta"] = p.zeta;
  j["lambda_hat"] = p.lambda_hat;
  j["v"] = p.v;
  j["right_tail"] = std::string(TailClassName(t.right_tail));
  j["left_tail"] = std::string(TailClassName(t.left_tail));
  j["valid"] = t.IsValid();
  j["nu_right_end"] = t.nu_right_end;
  j["nu_left_end"] = t.nu_left_end;
  if (t.nonneg_from) j["nonneg_from"] = *t.nonneg_from;
  if (t.nonpos_until) j["nonpos_until"] = *t.nonpos_until;
  return j;
}

absl::StatusOr<DualTrace> SolveFor(const DualProblem& p, double r_max,
                                   double step) {
  return SolveDualOde(p, r_max > 0.0 ? r_max : DefaultRMax(p), step);
}

absl::StatusOr<int> RunDual(const DualArgs& a, const Common& c, Outputs& io,
                            std::ostream& out, std::ostream& err) {
  DualProblem p{a.eps, a.zeta, a.lambda, a.v};
  std::sort(p.v.begin(), p.v.end());
  absl::StatusOr<DualTrace> t = SolveFor(p, a.r_max, a.step);
  if (!t.ok()) return t.status();
  if (absl::Status s = io.Write(c.out, Csv("r,nu", {t->r_grid, t->nu}));
      !s.ok()) {
    return s;
  }
  (c.out.empty() ? err : out) << TraceSummary(p, *t).dump(2) << "\n";
  return kExitOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string target = "line";
  double eps = 1.0;
  int k = 3;
  int restarts = 8;
  int grid_points = 32;
  int refine_iters = 200;
  int64_t mc_n = 200000;
};

absl::StatusOr<int> RunVerify(const VerifyArgs& a, const Common& c,
                              Outputs& io) {
  absl::StatusOr<MechanismConfig> mech =
      BuildMechanism(a.target, a.eps, a.k, c.threads);
  if (!mech.ok()) return mech.status();
  double reference;
  if (a.target == "line") {
    reference = *ClosedFormCost(a.eps, a.k);
  } else if (a.target == "ring-local") {
    reference = LocalRingBeta(a.eps) * kTwoPi / a.k;
  } else {
    absl::StatusOr<GeoRingResult> r = GeoRingOptimizeK2(a.eps, 512, c.threads);
    if (!r.ok()) return r.status();
    reference = r->cost;
  }
  const double exact = CertifiedCost(*mech);
  Json checks = Json::array();
  bool all = true;
  auto add = [&](const std::string& name, bool passed, const Json& detail) {
    Json entry;
    entry["name"] = name;
    entry["passed"] = passed;
    entry.update(detail);
    all = all && passed;
    checks.push_back(std::move(entry));
  };

  const PrivacyReport privacy = CheckPrivacy(mech->noise, a.eps, mech->metric);
  add("privacy", privacy.satisfied,
      Json{{"worst_ratio_log", privacy.worst_ratio_log}});
  add("exact_cost", std::fabs(exact - reference) <= 1e-9,
      Json{{"exact", exact}, {"reference", reference}});

  if (a.k <= 7) {
    SearchBudget budget{a.grid_points, a.refine_iters, a.restarts, c.seed};
    BruteForceOptions options;
    options.candidate = mech->offsets;
    options.threads = c.threads;
    absl::StatusOr<BruteForceResult> bf =
        BruteForceOffsets(mech->noise, a.k, mech->h, budget, options);
    if (!bf.ok()) return bf.status();
    add("brute_force", bf->cost >= exact - 1e-6,
        Json{{"cost", bf->cost}, {"offsets", OffsetsJson(bf->offsets)}});
  }

  absl::StatusOr<CostEstimate> mc =
      McCost(*mech, a.mc_n, c.seed, 0.0, c.threads);
  if (!mc.ok()) return mc.status();
  add("monte_carlo", std::fabs(mc->mean - exact) <= 4.0 * mc->std_error,
      Json{{"mean", mc->mean}, {"std_error", mc->std_error}, {"n", mc->n}});

  Json j;
  j["target"] = a.target;
  j["eps"] = a.eps;
  j["k"] = a.k;
  j["certified_cost"] = exact;
  j["checks"] = checks;
  j["passed"] = all;
  if (absl::Status s = io.Write(c.out, j.dump(2) + "\n"); !s.ok()) return s;
  return all ? kExitOk : kExitVerificationFailed;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string mech = "line";
  double eps = 1.0;
  int k = 3;
  int64_t n = 1000000;
  std::string log;
};

absl::StatusOr<int> RunSimulate(const SimulateArgs& a, const Common& c,
                                Outputs& io) {
  absl::StatusOr<MechanismConfig> mech =
      BuildMechanism(a.mech, a.eps, a.k, c.threads);
  if (!mech.ok()) return mech.status();
  absl::StatusOr<CostEstimate> est;
  if (a.log.empty()) {
    est = Simulate(*mech, a.n, c.seed, c.threads);
  } else {
    {
      std::ofstream log(a.log, std::ios::binary | std::ios::trunc);
      if (!log) return absl::InvalidArgumentError("cannot write " + a.log);
      est = Simulate(*mech, a.n, c.seed, c.threads, &log);
    }
    if (est.ok()) {
      if (absl::Status s = io.Record(a.log); !s.ok()) return s;
    }
  }
  if (!est.ok()) return est.status();
  const double exact = CertifiedCost(*mech);
  Json j;
  j["mech"] = a.mech;
  j["eps"] = a.eps;
  j["k"] = a.k;
  j["n"] = a.n;
  j["seed"] = c.seed;
  j["mean"] = est->mean;
  j["std_error"] = est->std_error;
  j["certified_cost"] = exact;
  j["z"] = est->std_error > 0.0 ? (est->mean - exact) / est->std_error : 0.0;
  if (absl::Status s = io.Write(c.out, j.dump(2) + "\n"); !s.ok()) return s;
  return kExitOk;
}

// ---- repro -----------------------------------------------------------------

absl::StatusOr<int> RunRepro(const std::string& figure, const Common& c,
                             Outputs& io) {
  if (figure == "intro1") {
    absl::StatusOr<MechanismConfig> m = MakeLineMechanism(1.0, 7);
    if (!m.ok()) return m.status();
    if (absl::Status s = io.Write(c.out, DensityCsv(m->noise)); !s.ok()) return s;
    if (!c.out.empty()) {
      std::vector<double> a(m->offsets.values().begin(),
                            m->offsets.values().end());
      if (absl::Status s = io.Write(Sibling(c.out, "_offsets.csv"),
                                    Csv("offset", {a}));
          !s.ok()) {
        return s;
      }
    }
    return kExitOk;
  }
  if (figure == "intro3") {
    const double eps = 3.0 / 8.0;
    absl::StatusOr<GeoRingResult> opt = GeoRingOptimizeK2(eps, 512, c.threads);
    if (!opt.ok()) return opt.status();
    absl::StatusOr<GeoRingResult> lap = GeoRingLaplaceK2(eps);
    if (!lap.ok()) return lap.status();
    std::vector<double> xs, optimal, laplace;
    for (int i = 0; i < 1024; ++i) {
      const double x = kTwoPi * i / 1024;
      xs.push_back(x);
      optimal.push_back(opt->density.Value(x));
      laplace.push_back(lap->density.Value(x));
    }
    if (absl::Status s = io.Write(
            c.out, Csv("x,rho_optimal,rho_laplace", {xs, optimal, laplace}));
        !s.ok()) {
      return s;
    }
    if (!c.out.empty()) {
      std::string side = "mechanism,offset,cost\n";
      for (double a : opt->offsets.values()) {
        absl::StrAppendFormat(&side, "optimal,%.17g,%.17g\n", a, opt->cost);
      }
      for (double a : lap->offsets.values()) {
        absl::StrAppendFormat(&side, "laplace,%.17g,%.17g\n", a, lap->cost);
      }
      if (absl::Status s = io.Write(Sibling(c.out, "_offsets.csv"), side);
          !s.ok()) {
        return s;
      }
    }
    return kExitOk;
  }
  if (figure == "dual40" || figure == "dual46") {
    DualProblem p{1.0, 0.1, figure == "dual40" ? 0.40 : 0.46,
                  {-std::log(4.0), 0.0, std::log(4.0)}};
    absl::StatusOr<DualTrace> t = SolveFor(p, 0.0, 1e-3);
    if (!t.ok()) return t.status();
    if (absl::Status s = io.Write(c.out, Csv("r,nu", {t->r_grid, t->nu}));
        !s.ok()) {
      return s;
    }
    return kExitOk;
  }
  return absl::InvalidArgumentError("unknown figure " + figure);
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Optimal multi-selection privacy mechanisms", "msdp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  std::function<absl::StatusOr<int>(Outputs&)> action;

  LineArgs line;
  CLI::App* cmd = app.add_subcommand("line", "Laplace noise with optimal offsets on the line");
  // --h names the disutility here, so help is long-form only.
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("--eps", line.eps, "Privacy parameter")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--k", line.k, "Number of results")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--h", line.h, "Disutility")->check(CLI::IsMember({"identity", "sqrt", "square"}));
  cmd->add_option("--method", line.method, "Offset construction")->check(CLI::IsMember({"closed", "recurrence"}));
  AddCommon(cmd, &common, "Output JSON file");
  cmd->callback([&] { action = [&](Outputs& io) { return RunLine(line, common, io); }; });

  RingArgs ring_local;
  cmd = app.add_subcommand("ring-local", "Optimal local mechanism on the ring");
  cmd->add_option("--eps", ring_local.eps, "Privacy parameter")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--k", ring_local.k, "Number of results")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--csv", ring_local.csv, "Density samples as x,rho (default: next to --out)");
  AddCommon(cmd, &common, "Output JSON file");
  cmd->callback([&] { action = [&](Outputs& io) { return RunRingLocal(ring_local, common, io); }; });

  RingArgs ring_geo;
  cmd = app.add_subcommand("ring-geo", "Geographic mechanism on the ring for k = 2");
  cmd->add_option("--eps", ring_geo.eps, "Privacy parameter")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--grid", ring_geo.grid, "Sweep points over t")->check(CLI::Range(64, 1 << 20));
  cmd->add_option("--csv", ring_geo.csv, "Density samples as x,rho (default: next to --out)");
  AddCommon(cmd, &common, "Output JSON file");
  cmd->callback([&] { action = [&](Outputs& io) { return RunRingGeo(ring_geo, common, io); }; });

  MhrArgs mhr;
  cmd = app.add_subcommand("mhr", "Quantile placement cost for log-concave noise");
  cmd->add_option("--dist", mhr.dist, "Noise magnitude law")->check(CLI::IsMember({"exp", "halfnormal"}));
  cmd->add_option("--eps", mhr.eps, "Inverse mean of the noise magnitude")->check(CLI::PositiveNumber);
  cmd->add_option("--kmax", mhr.kmax, "Largest K (powers of two up to it)")->check(CLI::Range(1, 1 << 16));
  AddCommon(cmd, &common, "Output CSV file (K,phi,bound,ratio)");
  cmd->callback([&] { action = [&](Outputs& io) { return RunMhr(mhr, common, io); }; });

  DualArgs dual;
  cmd = app.add_subcommand("dual", "Integrate the dual ODE and classify its tails");
  cmd->add_option("--eps", dual.eps, "Privacy parameter")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--zeta", dual.zeta, "Decay of the dual weight, 0 < zeta < eps")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", dual.lambda, "lambda_hat")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--v", dual.v, "Comma-separated response vector")->required()->delimiter(',');
  cmd->add_option("--step", dual.step, "RK4 step (at most 1e-3)")->check(CLI::Range(1e-9, 1e-3));
  cmd->add_option("--rmax", dual.r_max, "Integration half-width (default max|v| + 25 / min(eps, zeta))");
  AddCommon(cmd, &common, "Output CSV file (r,nu)");
  std::ostream* dual_out = &out;
  std::ostream* dual_err = &err;
  cmd->callback([&] {
    action = [&](Outputs& io) { return RunDual(dual, common, io, *dual_out, *dual_err); };
  });

  VerifyArgs verify;
  cmd = app.add_subcommand("verify", "Certify a mechanism against the brute-force and Monte Carlo oracles");
  cmd->add_option("--target", verify.target, "Mechanism")->check(CLI::IsMember({"line", "ring-local", "ring-geo"}));
  cmd->add_option("--eps", verify.eps, "Privacy parameter")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--k", verify.k, "Number of results")->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", verify.restarts, "Brute-force starts")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-points", verify.grid_points, "Line-search grid")->check(CLI::Range(2, 100000));
  cmd->add_option("--refine-iters", verify.refine_iters, "Coordinate sweeps per start")->check(CLI::PositiveNumber);
  cmd->add_option("--mc-n", verify.mc_n, "Monte Carlo draws")->check(CLI::Range(int64_t{1000}, int64_t{1} << 40));
  AddCommon(cmd, &common, "Output JSON report");
  cmd->callback([&] { action = [&](Outputs& io) { return RunVerify(verify, common, io); }; });

  SimulateArgs sim;
  cmd = app.add_subcommand("simulate", "Simulate client/server sessions");
  cmd->add_option("--mech", sim.mech, "Mechanism")->check(CLI::IsMember({"line", "ring-local", "ring-geo"}));
  cmd->add_option("--eps", sim.eps, "Privacy parameter")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--k", sim.k, "Number of results")->check(CLI::PositiveNumber);
  cmd->add_option("--n", sim.n, "Sessions")->check(CLI::Range(int64_t{2}, int64_t{1} << 40));
  cmd->add_option("--log", sim.log, "Session log (newline-delimited JSON)");
  AddCommon(cmd, &common, "Output JSON summary");
  cmd->callback([&] { action = [&](Outputs& io) { return RunSimulate(sim, common, io); }; });

  std::string figure;
  cmd = app.add_subcommand("repro", "Regenerate plot data for a figure");
  cmd->add_option("--figure", figure, "Figure")->required()->check(CLI::IsMember({"intro1", "intro3", "dual40", "dual46"}));
  AddCommon(cmd, &common, "Output CSV file");
  cmd->callback([&] { action = [&](Outputs& io) { return RunRepro(figure, common, io); }; });

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("msdp");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Outputs io(out, absl::StrJoin(args, " "), common.seed);
  absl::StatusOr<int> code = action(io);
  if (!code.ok()) return Fail(code.status(), err);
  if (absl::Status s = io.Finish(common.out); !s.ok()) return Fail(s, err);
  return *code;
}

}  // namespace msdp::cli
