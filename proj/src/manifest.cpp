/*
 * Copyright 2026 The ifair Authors.
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

#include "ifair/manifest.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace ifair {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot hash missing file: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buffer))) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(hash));
  return out;
}

void Manifest::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["tool_version"] = tool_version;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["params"] = params;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("manifest not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": bad manifest JSON: " + e.what());
  }
  Manifest m;
  m.stage = j.at("stage").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.params = j.at("params").get<std::map<std::string, std::string>>();
  return m;
}

void verify_against_manifests(const std::filesystem::path& out_dir,
                              const std::vector<std::filesystem::path>& inputs) {
  if (!std::filesystem::is_directory(out_dir)) return;
  std::map<std::string, std::string> recorded;
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() < 14 || name.substr(name.size() - 14) != ".manifest.json")
      continue;
    Manifest m = Manifest::load(entry.path());
    for (const auto& [file, hash] : m.outputs) recorded[file] = hash;
  }
  for (const auto& input : inputs) {
    const auto key = std::filesystem::weakly_canonical(input).string();
    auto it = recorded.find(key);
    if (it == recorded.end()) continue;
    if (hash_file(input) != it->second)
      throw ValidationError("input " + input.string() +
                            " no longer matches the hash recorded by the stage "
                            "that produced it");
  }
}

}  // namespace ifair
