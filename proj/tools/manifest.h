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


// Provenance record written next to every command's outputs.

#ifndef RTBCONF_TOOLS_MANIFEST_H_
#define RTBCONF_TOOLS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rtbconf::cli {

struct FileDigest {
  std::string path;
  std::string sha256;  // lowercase hex
};

// SHA-256 of the file's bytes; throws rtbconf::ArgumentError when unreadable.
std::string Sha256File(const std::filesystem::path& path);
FileDigest DigestOf(const std::string& path);

// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string UtcTimestamp();

struct RunManifest {
  std::vector<std::string> command;  // argv without the program name
  std::string subcommand;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::string code_version;
  std::string working_directory;
  std::string started_at;
  std::string finished_at;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  nlohmann::ordered_json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& j);

  void Save(const std::filesystem::path& path) const;
  static RunManifest Load(const std::filesystem::path& path);
};

}  // namespace rtbconf::cli

#endif  // RTBCONF_TOOLS_MANIFEST_H_
