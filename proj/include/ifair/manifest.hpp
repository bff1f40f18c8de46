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

#ifndef IFAIR_MANIFEST_HPP_
#define IFAIR_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ifair/types.hpp"

namespace ifair {

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string hash_file(const std::filesystem::path& path);  // hex fnv1a64

// Per-stage record of input/output content hashes, parameters, seed and tool
// version, written next to the stage's artifacts.
struct Manifest {
  std::string stage;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;   // path -> content hash
  std::map<std::string, std::string> outputs;  // path -> content hash
  std::map<std::string, std::string> params;

  void save(const std::filesystem::path& path) const;
  static Manifest load(const std::filesystem::path& path);
};

// Cross-checks a stage's inputs against hashes recorded by earlier stages in
// the same directory; a mismatch means an artifact changed under our feet.
void verify_against_manifests(const std::filesystem::path& out_dir,
                              const std::vector<std::filesystem::path>& inputs);

}  // namespace ifair

#endif  // IFAIR_MANIFEST_HPP_
