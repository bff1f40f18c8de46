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

#ifndef IFAIR_TESTS_NAIVE_METRICS_HPP_
#define IFAIR_TESTS_NAIVE_METRICS_HPP_

#include <map>
#include <random>
#include <string>
#include <vector>

#include "ifair/grouping.hpp"
#include "ifair/metrics.hpp"

// Independent naive-counting oracle: literal double sums over groups and
// items through the membership identity function, nothing shared with the
// metric module's counting path.
namespace ifair_test {

struct NaiveInstance {
  ifair::GroupScheme scheme{"naive", {"g0"}, {}};
  std::vector<std::vector<ifair::ItemId>> histories;
  std::vector<ifair::Slate> slates;
  int k = 1;
};

inline std::map<ifair::GroupLabel, double> naive_gh(const NaiveInstance& inst) {
  std::map<ifair::GroupLabel, double> out;
  double denominator = 0.0;
  for (const auto& group : inst.scheme.groups())
    for (const auto& history : inst.histories)
      for (const auto& item : history)
        denominator += inst.scheme.membership(item, group);
  for (const auto& group : inst.scheme.groups()) {
    double numerator = 0.0;
    for (const auto& history : inst.histories)
      for (const auto& item : history)
        numerator += inst.scheme.membership(item, group);
    out[group] = numerator / denominator;
  }
  return out;
}

inline std::map<ifair::GroupLabel, double> naive_gp(const NaiveInstance& inst) {
  std::map<ifair::GroupLabel, double> out;
  double denominator = 0.0;
  for (const auto& group : inst.scheme.groups())
    for (const auto& slate : inst.slates)
      for (std::size_t r = 0;
           r < slate.ranked_items.size() && r < static_cast<std::size_t>(inst.k);
           ++r)
        denominator += inst.scheme.membership(slate.ranked_items[r], group);
  for (const auto& group : inst.scheme.groups()) {
    double numerator = 0.0;
    for (const auto& slate : inst.slates)
      for (std::size_t r = 0;
           r < slate.ranked_items.size() && r < static_cast<std::size_t>(inst.k);
           ++r)
        numerator += inst.scheme.membership(slate.ranked_items[r], group);
    out[group] = numerator / denominator;
  }
  return out;
}

// Random instance within the oracle-equivalence envelope: at most 20 items,
// 4 groups, 10 slates. A sentinel grouped item keeps both sides nonzero.
inline NaiveInstance random_instance(std::mt19937_64& rng) {
  const auto pick = [&](std::size_t n) { return rng() % n; };
  NaiveInstance inst;
  const std::size_t n_items = 2 + pick(19);   // 2..20
  const std::size_t n_groups = 1 + pick(4);   // 1..4

  std::vector<ifair::ItemId> items;
  for (std::size_t i = 0; i < n_items; ++i) items.push_back("i" + std::to_string(i));
  std::vector<ifair::GroupLabel> groups;
  for (std::size_t g = 0; g < n_groups; ++g) groups.push_back("g" + std::to_string(g));

  std::map<ifair::ItemId, std::vector<ifair::GroupLabel>> membership;
  membership[items[0]] = {groups[0]};  // sentinel
  for (std::size_t i = 1; i < n_items; ++i) {
    std::vector<ifair::GroupLabel> mine;
    for (const auto& group : groups)
      if (pick(3) != 0) mine.push_back(group);  // some items stay ungrouped
    if (!mine.empty()) membership[items[i]] = mine;
  }
  inst.scheme = ifair::GroupScheme("naive", groups, membership);

  const std::size_t n_histories = 1 + pick(6);
  for (std::size_t h = 0; h < n_histories; ++h) {
    std::vector<ifair::ItemId> history = {items[0]};
    const std::size_t len = 1 + pick(8);
    for (std::size_t j = 0; j < len; ++j) history.push_back(items[pick(n_items)]);
    inst.histories.push_back(std::move(history));
  }

  const std::size_t n_slates = 1 + pick(10);
  for (std::size_t s = 0; s < n_slates; ++s) {
    ifair::Slate slate;
    slate.sequence_ref = std::to_string(s);
    std::vector<ifair::ItemId> pool = items;
    for (std::size_t j = pool.size() - 1; j > 0; --j)
      std::swap(pool[j], pool[pick(j + 1)]);
    const std::size_t len = 1 + pick(n_items);
    slate.ranked_items.assign(pool.begin(), pool.begin() + len);
    slate.ranked_items[pick(len)] = items[0];  // keep a grouped item in view
    // the overwrite may duplicate the sentinel; drop later copies
    std::vector<ifair::ItemId> dedup;
    for (const auto& id : slate.ranked_items)
      if (std::find(dedup.begin(), dedup.end(), id) == dedup.end())
        dedup.push_back(id);
    slate.ranked_items = std::move(dedup);
    inst.slates.push_back(std::move(slate));
  }
  inst.k = 1 + static_cast<int>(pick(n_items));
  return inst;
}

}  // namespace ifair_test

#endif  // IFAIR_TESTS_NAIVE_METRICS_HPP_
