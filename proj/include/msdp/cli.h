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

// Command-line front end. Subcommands: line, ring-local, ring-geo, mhr, dual,
// verify, simulate and repro.
//
// Exit codes: 0 on success, 1 when a verification fails, 2 on a usage error.

#ifndef MSDP_CLI_H_
#define MSDP_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace msdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr char kToolVersion[] = "0.1.0";

// `args` includes the program name. Results named by --out are written to
// files together with a "<out>.manifest.json"; without --out they go to
// `out`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace msdp::cli

#endif  // MSDP_CLI_H_
