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


#include "manifest.h"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include "rtbconf/errors.h"

namespace rtbconf::cli {

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    const std::streamsize got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx.get(), buffer.data(),
                         static_cast<std::size_t>(got)) != 1) {
      throw Error("SHA-256 update failed");
    }
  }
  if (in.bad()) throw Error("read failed: " + path.string());
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw Error("SHA-256 finalisation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

FileDigest DigestOf(const std::string& path) { return {path, Sha256File(path)}; }

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

namespace {

nlohmann::ordered_json DigestsToJson(const std::vector<FileDigest>& files) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const FileDigest& f : files) {
    out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  }
  return out;
}

std::vector<FileDigest> DigestsFromJson(const nlohmann::json& j) {
  std::vector<FileDigest> out;
  for (const auto& f : j) {
    out.push_back({f.at("path").get<std::string>(),
                   f.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

nlohmann::ordered_json RunManifest::ToJson() const {
  nlohmann::ordered_json j;
  j["code_version"] = code_version;
  j["subcommand"] = subcommand;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json();
  j["working_directory"] = working_directory;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["inputs"] = DigestsToJson(inputs);
  j["outputs"] = DigestsToJson(outputs);
  return j;
}

RunManifest RunManifest::FromJson(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.code_version = j.at("code_version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.command = j.at("command").get<std::vector<std::string>>();
    m.config = nlohmann::ordered_json(j.at("config"));
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.working_directory = j.at("working_directory").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.inputs = DigestsFromJson(j.at("inputs"));
    m.outputs = DigestsFromJson(j.at("outputs"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void RunManifest::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << ToJson().dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

RunManifest RunManifest::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest is not valid JSON: " + std::string(e.what()));
  }
  return FromJson(j);
}

}  // namespace rtbconf::cli
