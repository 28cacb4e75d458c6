// Copyright 2026 The sgshape Authors
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

#ifndef SGSHAPE_CLI_HPP_
#define SGSHAPE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace sgshape {

// Exit codes of the command-line tool.
enum ExitCode {
  kExitOk = 0,        // success / check passed
  kExitInternal = 1,  // unexpected failure
  kExitInput = 2,     // bad arguments or input files
  kExitNegative = 3,  // not Nash / not invariant / no equilibrium found
};

// Runs one invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgshape

#endif  // SGSHAPE_CLI_HPP_
