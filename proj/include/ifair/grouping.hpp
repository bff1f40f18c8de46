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

#ifndef IFAIR_GROUPING_HPP_
#define IFAIR_GROUPING_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ifair/types.hpp"

namespace ifair {

// A named assignment of items to groups. Immutable after construction;
// lookups are safe under unrestricted concurrent reads.
class GroupScheme {
 public:
  GroupScheme(std::string name, std::vector<GroupLabel> groups,
              std::map<ItemId, std::vector<GroupLabel>> membership);

  const std::string& name() const { return name_; }
  const std::vector<GroupLabel>& groups() const { return groups_; }

  // The identity function 1(v in G). Unknown items belong to no group.
  // Throws ValidationError if the group label is not part of the scheme.
  int membership(const ItemId& item, const GroupLabel& group) const;

  // Group labels of an item; empty for unknown or ungrouped items.
  const std::vector<GroupLabel>& groups_of(const ItemId& item) const;

  const std::map<ItemId, std::vector<GroupLabel>>& membership_map() const {
    return membership_;
  }

  std::string to_json() const;
  static GroupScheme from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static GroupScheme load(const std::filesystem::path& path);

 private:
  std::string name_;
  std::vector<GroupLabel> groups_;
  std::map<ItemId, std::vector<GroupLabel>> membership_;
};

struct PopularityOptions {
  bool train_events_only = true;  // count over the 8 training periods only
  int n_groups = 5;
};

// Items ranked ascending by interaction count (ties by item id), then cut
// into n_groups contiguous buckets of near-equal item count; a remainder of
// r gives one extra item to each of the r least popular buckets. Labels run
// "0" (least popular) to "n_groups-1" (most popular). Items without events
// count as zero and rank lowest.
GroupScheme popularity_scheme(const InteractionLog& log,
                              const PopularityOptions& options = {});

// One group per distinct genre label; an item belongs to every genre in its
// metadata, possibly none.
GroupScheme genre_scheme(const InteractionLog& log);

}  // namespace ifair

#endif  // IFAIR_GROUPING_HPP_
