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

#include <algorithm>
#include <climits>
#include <cstdio>
#include <random>
#include <set>

#include "doctest.h"
#include "ifair/grouping.hpp"
#include "test_util.hpp"

using namespace ifair;

namespace {

// count[i] events for item i, timestamps spread so every period is covered.
InteractionLog log_with_counts(const std::vector<std::pair<ItemId, int>>& counts) {
  InteractionLog log;
  std::int64_t ts = 0;
  for (const auto& [id, count] : counts) {
    log.items[id] = {"title " + id, {}};
    for (int c = 0; c < count; ++c)
      log.events.push_back({"u" + std::to_string(c % 7), id, ++ts});
  }
  return log;
}

}  // namespace

TEST_CASE("popularity scheme buckets by ascending count") {
  std::vector<std::pair<ItemId, int>> counts;
  for (int i = 1; i <= 10; ++i)
    counts.emplace_back("i" + std::to_string(i), i);  // item i interacts i times
  const auto log = log_with_counts(counts);
  const auto scheme =
      popularity_scheme(log, {.train_events_only = false, .n_groups = 5});
  REQUIRE(scheme.groups() == std::vector<GroupLabel>{"0", "1", "2", "3", "4"});
  CHECK(scheme.membership("i1", "0") == 1);
  CHECK(scheme.membership("i2", "0") == 1);
  CHECK(scheme.membership("i3", "1") == 1);
  CHECK(scheme.membership("i9", "4") == 1);
  CHECK(scheme.membership("i10", "4") == 1);
}

TEST_CASE("popularity ties resolve by item id") {
  std::vector<std::pair<ItemId, int>> counts;
  for (char c = 'a'; c <= 'j'; ++c) counts.emplace_back(std::string(1, c), 2);
  const auto scheme = popularity_scheme(log_with_counts(counts),
                                        {.train_events_only = false, .n_groups = 5});
  CHECK(scheme.membership("a", "0") == 1);
  CHECK(scheme.membership("b", "0") == 1);
  CHECK(scheme.membership("c", "1") == 1);
  CHECK(scheme.membership("j", "4") == 1);
}

TEST_CASE("popularity remainder goes to the least popular buckets") {
  std::vector<std::pair<ItemId, int>> counts;
  for (int i = 0; i < 11; ++i)
    counts.emplace_back("i" + std::to_string(static_cast<char>('a' + i)), 1 + i);
  const auto scheme = popularity_scheme(log_with_counts(counts),
                                        {.train_events_only = false, .n_groups = 5});
  std::map<GroupLabel, int> sizes;
  for (const auto& [item, groups] : scheme.membership_map())
    for (const auto& group : groups) ++sizes[group];
  CHECK(sizes.at("0") == 3);
  CHECK(sizes.at("1") == 2);
  CHECK(sizes.at("2") == 2);
  CHECK(sizes.at("3") == 2);
  CHECK(sizes.at("4") == 2);
}

TEST_CASE("popularity scheme rejects more groups than items") {
  const auto log = log_with_counts({{"a", 3}, {"b", 4}, {"c", 5}});
  CHECK_THROWS_AS(
      popularity_scheme(log, {.train_events_only = false, .n_groups = 5}),
      ValidationError);
}

TEST_CASE("popularity counting can exclude held-out periods") {
  // Item "hot" interacts only in the last fifth of the timeline, so its
  // training-window count is zero; over all events it dominates.
  InteractionLog log;
  for (const auto& id : {"hot", "warm", "cold", "a", "b"})
    log.items[id] = {id, {}};
  std::int64_t ts = 0;
  for (int i = 0; i < 40; ++i) log.events.push_back({"u1", "warm", ++ts});
  for (int i = 0; i < 20; ++i) log.events.push_back({"u1", "cold", ++ts});
  for (int i = 0; i < 20; ++i) log.events.push_back({"u1", "a", ++ts});
  for (int i = 0; i < 20; ++i) log.events.push_back({"u1", "hot", ++ts});

  const auto train_only =
      popularity_scheme(log, {.train_events_only = true, .n_groups = 5});
  const auto all_events =
      popularity_scheme(log, {.train_events_only = false, .n_groups = 5});
  // 80 training events hold no "hot" interactions at all.
  CHECK(train_only.membership("hot", "1") == 1);
  CHECK(train_only.membership("warm", "4") == 1);
  CHECK(all_events.membership("hot", "3") == 1);
}

TEST_CASE("popularity partition invariants on random logs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n_items = 5 + rng() % 40;
    std::vector<std::pair<ItemId, int>> counts;
    int total = 0;
    for (std::size_t i = 0; i < n_items; ++i) {
      char name[16];
      std::snprintf(name, sizeof(name), "i%03zu", i);
      counts.emplace_back(name, static_cast<int>(rng() % 9));  // zero counts too
      total += counts.back().second;
    }
    if (total < 10) counts[0].second += 10 - total;
    const auto log = log_with_counts(counts);
    const int n_groups = 1 + static_cast<int>(rng() % 5);
    if (n_items < static_cast<std::size_t>(n_groups)) continue;
    const auto scheme = popularity_scheme(
        log, {.train_events_only = false, .n_groups = n_groups});

    std::map<GroupLabel, std::vector<ItemId>> members;
    std::size_t covered = 0;
    for (const auto& [item, groups] : scheme.membership_map()) {
      REQUIRE(groups.size() == 1);  // popularity assigns exactly one group
      members[groups[0]].push_back(item);
      ++covered;
    }
    CHECK(covered == log.items.size());

    std::size_t min_size = SIZE_MAX, max_size = 0;
    for (const auto& group : scheme.groups()) {
      const auto size = members[group].size();
      min_size = std::min(min_size, size);
      max_size = std::max(max_size, size);
    }
    CHECK(max_size - min_size <= 1);

    // Monotone counts across bucket boundaries.
    std::map<ItemId, int> count_of(counts.begin(), counts.end());
    int prev_max = -1;
    for (const auto& group : scheme.groups()) {
      int lo = INT_MAX, hi = -1;
      for (const auto& item : members[group]) {
        lo = std::min(lo, count_of[item]);
        hi = std::max(hi, count_of[item]);
      }
      CHECK(lo >= prev_max - 0);  // ties may straddle, order never reverses
      prev_max = std::max(prev_max, hi);
    }
  }
}

TEST_CASE("genre scheme covers each item per its metadata") {
  InteractionLog log;
  log.items["m1"] = {"m1", {"Action", "Comedy"}};
  log.items["m2"] = {"m2", {"Action"}};
  log.items["m3"] = {"m3", {}};
  log.events.push_back({"u1", "m1", 1});
  const auto scheme = genre_scheme(log);
  CHECK(scheme.groups() == std::vector<GroupLabel>{"Action", "Comedy"});
  CHECK(scheme.membership("m1", "Action") == 1);
  CHECK(scheme.membership("m1", "Comedy") == 1);
  CHECK(scheme.membership("m2", "Comedy") == 0);
  CHECK(scheme.groups_of("m3").empty());

  // Genre cover: sum of group sizes equals sum of genre-set sizes.
  std::size_t group_total = 0;
  for (const auto& [item, groups] : scheme.membership_map())
    group_total += groups.size();
  std::size_t genre_total = 0;
  for (const auto& [id, info] : log.items) genre_total += info.genres.size();
  CHECK(group_total == genre_total);
}

TEST_CASE("single-genre log yields one group holding every tagged item") {
  InteractionLog log;
  log.items["a"] = {"a", {"Drama"}};
  log.items["b"] = {"b", {"Drama"}};
  log.events.push_back({"u1", "a", 1});
  const auto scheme = genre_scheme(log);
  REQUIRE(scheme.groups() == std::vector<GroupLabel>{"Drama"});
  CHECK(scheme.membership("a", "Drama") == 1);
  CHECK(scheme.membership("b", "Drama") == 1);
}

TEST_CASE("membership lookups") {
  GroupScheme scheme("s", {"G", "H"}, {{"x", {"G"}}});
  CHECK(scheme.membership("x", "G") == 1);
  CHECK(scheme.membership("x", "H") == 0);
  CHECK(scheme.membership("ghost", "G") == 0);  // unknown items: no membership
  CHECK_THROWS_AS(scheme.membership("x", "Z"), ValidationError);
}

TEST_CASE("scheme JSON export and import round trip") {
  GroupScheme scheme("custom", {"b", "a"}, {{"x", {"a", "b"}}, {"y", {"b"}}});
  const auto text = scheme.to_json();
  const auto parsed = GroupScheme::from_json(text);
  CHECK(parsed.name() == "custom");
  CHECK(parsed.groups() == scheme.groups());
  CHECK(parsed.membership_map() == scheme.membership_map());

  ifair_test::TempDir tmp;
  scheme.save(tmp.file("scheme.json"));
  const auto loaded = GroupScheme::load(tmp.file("scheme.json"));
  CHECK(loaded.membership_map() == scheme.membership_map());

  CHECK_THROWS_AS(GroupScheme::from_json("{"), ValidationError);
  CHECK_THROWS_AS(GroupScheme::from_json(R"({"name":"x"})"), ValidationError);
}

TEST_CASE("scheme construction validates labels") {
  CHECK_THROWS_AS(GroupScheme("dup", {"a", "a"}, {}), ValidationError);
  CHECK_THROWS_AS(GroupScheme("bad", {"a"}, {{"x", {"zzz"}}}), ValidationError);
}
