// Copyright 2026 The hlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <iosfwd>
#include <string>

#include "hlearn/config.hpp"

namespace hlearn::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIo = 2, kExitNotConverged = 3 };

inline constexpr const char* kCommands[] = {"dynamics", "steady", "sweep", "incidental", "multicost-verify", "abm"};

/// Runs one subcommand and writes its artifact to `config.out`. Diagnostics
/// go to `err`. Returns one of ExitCode.
int dispatch(const std::string& command, const RunConfig& config, std::ostream& err);

}  // namespace hlearn::cli
