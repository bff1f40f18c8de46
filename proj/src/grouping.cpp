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

#include "ifair/grouping.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "ifair/dataset.hpp"
#include "json.hpp"

namespace ifair {

namespace {
const std::vector<GroupLabel> kNoGroups;
}  // namespace

GroupScheme::GroupScheme(std::string name, std::vector<GroupLabel> groups,
                         std::map<ItemId, std::vector<GroupLabel>> membership)
    : name_(std::move(name)),
      groups_(std::move(groups)),
      membership_(std::move(membership)) {
  std::set<GroupLabel> known(groups_.begin(), groups_.end());
  if (known.size() != groups_.size())
    throw ValidationError("scheme '" + name_ + "' has duplicate group labels");
  for (auto& [item, labels] : membership_) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (const auto& label : labels) {
      if (!known.count(label))
        throw ValidationError("scheme '" + name_ + "': item " + item +
                              " maps to unknown group " + label);
    }
  }
}

int GroupScheme::membership(const ItemId& item, const GroupLabel& group) const {
  if (std::find(groups_.begin(), groups_.end(), group) == groups_.end())
    throw ValidationError("group " + group + " is not part of scheme '" + name_ + "'");
  auto it = membership_.find(item);
  if (it == membership_.end()) return 0;
  return std::binary_search(it->second.begin(), it->second.end(), group) ? 1 : 0;
}

const std::vector<GroupLabel>& GroupScheme::groups_of(const ItemId& item) const {
  auto it = membership_.find(item);
  return it == membership_.end() ? kNoGroups : it->second;
}

std::string GroupScheme::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name_;
  j["groups"] = groups_;
  nlohmann::ordered_json members = nlohmann::ordered_json::object();
  for (const auto& group : groups_) members[group] = nlohmann::json::array();
  for (const auto& [item, labels] : membership_)
    for (const auto& label : labels) members[label].push_back(item);
  j["membership"] = std::move(members);
  return j.dump(2);
}

GroupScheme GroupScheme::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scheme JSON parse failure: ") + e.what());
  }
  if (!j.contains("name") || !j.contains("groups") || !j.contains("membership"))
    throw ValidationError("scheme JSON must contain name, groups and membership");
  std::vector<GroupLabel> groups = j["groups"].get<std::vector<GroupLabel>>();
  std::map<ItemId, std::vector<GroupLabel>> membership;
  for (const auto& [label, ids] : j["membership"].items())
    for (const auto& id : ids) membership[id.get<ItemId>()].push_back(label);
  return GroupScheme(j["name"].get<std::string>(), std::move(groups),
                     std::move(membership));
}

void GroupScheme::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write scheme file: " + path.string());
  out << to_json() << '\n';
}

GroupScheme GroupScheme::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("scheme file not found: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

GroupScheme popularity_scheme(const InteractionLog& log,
                              const PopularityOptions& options) {
  if (options.n_groups < 1) throw ValidationError("n_groups must be >= 1");
  if (log.items.empty()) throw ValidationError("popularity scheme needs a nonempty log");
  if (log.items.size() < static_cast<std::size_t>(options.n_groups))
    throw ValidationError("fewer items (" + std::to_string(log.items.size()) +
                          ") than popularity groups (" +
                          std::to_string(options.n_groups) + ")");

  std::unordered_map<ItemId, std::size_t> counts;
  counts.reserve(log.items.size());
  if (options.train_events_only) {
    // Test-time counts would leak future popularity into the grouping.
    const PeriodSplit split = split_periods(log);
    for (const Event& e : split.events_of(SplitPart::train)) ++counts[e.item];
  } else {
    for (const Event& e : log.events) ++counts[e.item];
  }

  std::vector<std::pair<std::size_t, ItemId>> ranked;
  ranked.reserve(log.items.size());
  for (const auto& [id, info] : log.items) {
    auto it = counts.find(id);
    ranked.emplace_back(it == counts.end() ? 0 : it->second, id);
  }
  std::sort(ranked.begin(), ranked.end());

  const std::size_t n = ranked.size();
  const std::size_t n_groups = static_cast<std::size_t>(options.n_groups);
  const std::size_t base = n / n_groups;
  const std::size_t remainder = n % n_groups;

  std::vector<GroupLabel> labels;
  labels.reserve(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) labels.push_back(std::to_string(g));

  std::map<ItemId, std::vector<GroupLabel>> membership;
  std::size_t cursor = 0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t bucket = base + (g < remainder ? 1 : 0);
    for (std::size_t i = 0; i < bucket; ++i, ++cursor)
      membership[ranked[cursor].second] = {labels[g]};
  }
  return GroupScheme("popularity", std::move(labels), std::move(membership));
}

GroupScheme genre_scheme(const InteractionLog& log) {
  if (log.items.empty()) throw ValidationError("genre scheme needs a nonempty log");
  std::set<GroupLabel> labels;
  for (const auto& [id, info] : log.items)
    labels.insert(info.genres.begin(), info.genres.end());
  std::map<ItemId, std::vector<GroupLabel>> membership;
  for (const auto& [id, info] : log.items)
    if (!info.genres.empty()) membership[id] = info.genres;
  return GroupScheme("genre", {labels.begin(), labels.end()}, std::move(membership));
}

}  // namespace ifair
