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

#ifndef IFAIR_TYPES_HPP_
#define IFAIR_TYPES_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifair {

using ItemId = std::string;
using UserId = std::string;
using GroupLabel = std::string;
// Canonical reference of a sequence: its decimal index in the ordered
// output of build_sequences (equals the line number in sequences.jsonl).
using SequenceRef = std::string;

inline constexpr const char* kToolVersion = "0.1.0";

// Validation failures in user-supplied data or arguments (CLI exit 3).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required input file or artifact is absent (CLI exit 2).
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant was broken (CLI exit 4).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Event {
  UserId user;
  ItemId item;
  std::int64_t timestamp = 0;
};

struct ItemInfo {
  std::string title;
  std::vector<std::string> genres;  // sorted, unique; may be empty
};

// Timestamped interaction events plus item metadata. The source of truth
// for all splits, counts and group schemes.
struct InteractionLog {
  std::vector<Event> events;
  std::map<ItemId, ItemInfo> items;
};

enum class SplitPart { train, validation, test };

const char* to_string(SplitPart part);
SplitPart split_part_from_string(const std::string& name);

struct Sequence {
  SequenceRef ref;
  UserId user;
  std::vector<ItemId> history;  // chronological, most recent last, length 1..max_len
  ItemId target;
  SplitPart split = SplitPart::train;
};

// Total order used everywhere events must be sorted: (timestamp, user, item).
inline bool event_order(const Event& a, const Event& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  if (a.user != b.user) return a.user < b.user;
  return a.item < b.item;
}

}  // namespace ifair

#endif  // IFAIR_TYPES_HPP_
