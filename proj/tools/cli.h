// tools/cli.h

// Copyright 2026  The stab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef STAB_TOOLS_CLI_H_
#define STAB_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace stab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;

// Entry point shared by the `stab` binary and the tests. `args` excludes the
// program name. Returns the process exit status.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Expands `--config <file>` into `--key=value` arguments placed right after
// the subcommand, so flags given on the command line take precedence.
std::vector<std::string> ExpandConfigFile(const std::vector<std::string>& args);

}  // namespace stab

#endif  // STAB_TOOLS_CLI_H_
