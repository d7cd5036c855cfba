// wsm/cli.hpp

// Copyright 2026  The wsm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WSM_CLI_HPP
#define WSM_CLI_HPP

#include <string>
#include <vector>

namespace wsm {

/// Dispatch a command line. Exit codes: 0 success, 1 usage error, 2 data
/// error, 3 numeric failure. Every run writes a run.json with the fully
/// resolved configuration; `--config run.json` replays it.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace wsm

#endif  // WSM_CLI_HPP
