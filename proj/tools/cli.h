/*
 * Copyright 2026 The rtbconf Authors.
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


#ifndef RTBCONF_TOOLS_CLI_H_
#define RTBCONF_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace rtbconf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;  // bad flags, schema or specification
inline constexpr int kExitData = 3;   // malformed data, failed verification

// Runs one command. `args` excludes the program name, e.g.
// {"search", "--input", "scored.csv", "--limit", "200"}.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace rtbconf::cli

#endif  // RTBCONF_TOOLS_CLI_H_
