// Copyright 2026 The dpacct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every command prints a CSV table (or a JSON array
// of row objects with --json) to stdout or --out, and writes a run manifest
// that `replay` can re-execute.

#ifndef DPACCT_TOOLS_CLI_H_
#define DPACCT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace dpacct::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Thread count override read at startup.
inline constexpr char kThreadsEnv[] = "DPACCT_NUM_THREADS";

// Manifest path used when neither --manifest nor --out is given.
inline constexpr char kDefaultManifest[] = "dpacct_manifest.json";

// `args` excludes the program name. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Shortest decimal string that parses back to exactly `x`.
std::string FormatDouble(double x);

}  // namespace dpacct::cli

#endif  // DPACCT_TOOLS_CLI_H_
