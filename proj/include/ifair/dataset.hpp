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

#ifndef IFAIR_DATASET_HPP_
#define IFAIR_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "ifair/types.hpp"

namespace ifair {

inline constexpr int kNumPeriods = 10;
inline constexpr int kTrainPeriods = 8;  // periods 1-8 train, 9 validation, 10 test
inline constexpr std::size_t kDefaultSampleSize = 65536;
inline constexpr int kDefaultMaxHistory = 10;

// Events in total order, cut into kNumPeriods contiguous buckets of
// near-equal size.
struct PeriodSplit {
  std::vector<std::vector<Event>> periods;

  SplitPart part_of(int period_index) const;  // 0-based
  std::vector<Event> events_of(SplitPart part) const;
  std::size_t total_events() const;
};

struct SampleDraw {
  std::vector<Sequence> sequences;
  std::uint64_t seed = 0;
  std::size_t size = kDefaultSampleSize;
};

// Reads the interactions TSV (user_id, item_id, timestamp) and items TSV
// (item_id, title, pipe-separated genres). Both files carry a header line.
// Malformed rows raise ValidationError naming file, line and field; events
// referencing unknown items raise ValidationError listing the ids.
InteractionLog ingest(const std::filesystem::path& interactions_file,
                      const std::filesystem::path& items_file);

// Drops every item whose genres all fall below min_interactions total event
// count, together with its events. Items holding at least one qualifying
// genre stay, as do items with no genres at all.
InteractionLog filter_rare_genres(const InteractionLog& log, std::size_t min_interactions);

// Sorts events by (timestamp, user, item) and partitions them into
// kNumPeriods contiguous buckets whose sizes differ by at most one (earlier
// periods take the remainder). Throws ValidationError on fewer than
// kNumPeriods events.
PeriodSplit split_periods(const InteractionLog& log);

// Emits one Sequence per event with nonempty prior history: the target is
// the event's item, the history is the user's up-to-max_len most recent
// earlier interactions (crossing period boundaries), and the split is the
// target's period partition. Output is ordered by the global event order and
// refs are the positions in that order.
std::vector<Sequence> build_sequences(const PeriodSplit& split,
                                      int max_len = kDefaultMaxHistory);

// Uniform sample without replacement, deterministic for a fixed (input
// order, size, seed); pools not larger than size are returned whole.
// Relative input order is preserved.
SampleDraw draw_training_sample(const std::vector<Sequence>& sequences,
                                std::size_t size, std::uint64_t seed);

// JSON-lines round trip; refs are positional (line index).
void write_sequences_jsonl(const std::vector<Sequence>& sequences,
                           const std::filesystem::path& path);
std::vector<Sequence> read_sequences_jsonl(const std::filesystem::path& path);

}  // namespace ifair

#endif  // IFAIR_DATASET_HPP_
