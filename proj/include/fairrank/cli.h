/*
 * Copyright 2026 The fairrank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRRANK_CLI_H_
#define FAIRRANK_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace fairrank::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kModuleError = 1;
inline constexpr int kUsageError = 2;

// Environment variable holding the default worker count for commands that
// can evaluate independent sweep points in parallel.
inline constexpr const char* kThreadsEnv = "FAIRRANK_THREADS";

// Runs one subcommand. `args` excludes the program name. Progress and
// summaries go to `out`; usage text and error names go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairrank::cli

#endif  // FAIRRANK_CLI_H_
