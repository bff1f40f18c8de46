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

#include "ifair/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ifair/rng.hpp"
#include "json.hpp"

namespace ifair {

namespace {

constexpr const char* kInteractionsHeader = "user_id\titem_id\ttimestamp";
constexpr const char* kItemsHeader = "item_id\ttitle\tgenres";

[[noreturn]] void malformed(const std::filesystem::path& file, std::size_t line,
                            const std::string& field, const std::string& why) {
  throw ValidationError(file.string() + ":" + std::to_string(line) +
                        ": malformed row: field '" + field + "' " + why);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// getline that also eats a trailing '\r' so CRLF files parse.
bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void check_header(std::ifstream& in, const std::filesystem::path& file,
                  const char* expected) {
  std::string line;
  if (!read_line(in, line)) return;  // empty file: zero records
  if (line != expected)
    throw ValidationError(file.string() + ":1: expected header '" +
                          std::string(expected) + "', got '" + line + "'");
}

}  // namespace

SplitPart PeriodSplit::part_of(int period_index) const {
  if (period_index < 0 || period_index >= kNumPeriods)
    throw InternalError("period index out of range");
  if (period_index < kTrainPeriods) return SplitPart::train;
  return period_index == kTrainPeriods ? SplitPart::validation : SplitPart::test;
}

std::vector<Event> PeriodSplit::events_of(SplitPart part) const {
  std::vector<Event> out;
  for (int p = 0; p < static_cast<int>(periods.size()); ++p)
    if (part_of(p) == part)
      out.insert(out.end(), periods[p].begin(), periods[p].end());
  return out;
}

std::size_t PeriodSplit::total_events() const {
  std::size_t n = 0;
  for (const auto& period : periods) n += period.size();
  return n;
}

InteractionLog ingest(const std::filesystem::path& interactions_file,
                      const std::filesystem::path& items_file) {
  if (!std::filesystem::exists(interactions_file))
    throw MissingInputError("interactions file not found: " +
                            interactions_file.string());
  if (!std::filesystem::exists(items_file))
    throw MissingInputError("items file not found: " + items_file.string());

  InteractionLog log;

  {
    std::ifstream in(items_file, std::ios::binary);
    if (!in) throw MissingInputError("cannot open " + items_file.string());
    check_header(in, items_file, kItemsHeader);
    std::string line;
    std::size_t line_no = 1;
    while (read_line(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = split_tabs(line);
      if (fields.size() != 3)
        malformed(items_file, line_no, "row",
                  "has " + std::to_string(fields.size()) + " fields, want 3");
      if (fields[0].empty()) malformed(items_file, line_no, "item_id", "is empty");
      ItemInfo info;
      info.title = fields[1];
      if (!fields[2].empty()) {
        std::size_t start = 0;
        while (start <= fields[2].size()) {
          const std::size_t pos = fields[2].find('|', start);
          const std::string genre =
              pos == std::string::npos ? fields[2].substr(start)
                                       : fields[2].substr(start, pos - start);
          if (genre.empty())
            malformed(items_file, line_no, "genres", "contains an empty label");
          info.genres.push_back(genre);
          if (pos == std::string::npos) break;
          start = pos + 1;
        }
        std::sort(info.genres.begin(), info.genres.end());
        info.genres.erase(std::unique(info.genres.begin(), info.genres.end()),
                          info.genres.end());
      }
      if (!log.items.emplace(fields[0], std::move(info)).second)
        malformed(items_file, line_no, "item_id", "duplicates " + fields[0]);
    }
  }

  std::set<ItemId> unknown;
  {
    std::ifstream in(interactions_file, std::ios::binary);
    if (!in) throw MissingInputError("cannot open " + interactions_file.string());
    check_header(in, interactions_file, kInteractionsHeader);
    std::string line;
    std::size_t line_no = 1;
    while (read_line(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = split_tabs(line);
      if (fields.size() != 3)
        malformed(interactions_file, line_no, "row",
                  "has " + std::to_string(fields.size()) + " fields, want 3");
      if (fields[0].empty())
        malformed(interactions_file, line_no, "user_id", "is empty");
      if (fields[1].empty())
        malformed(interactions_file, line_no, "item_id", "is empty");
      std::int64_t ts = 0;
      const auto [ptr, ec] = std::from_chars(
          fields[2].data(), fields[2].data() + fields[2].size(), ts);
      if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
        malformed(interactions_file, line_no, "timestamp",
                  "is not an integer: '" + fields[2] + "'");
      if (ts < 0)
        malformed(interactions_file, line_no, "timestamp", "is negative");
      if (!log.items.count(fields[1])) unknown.insert(fields[1]);
      log.events.push_back({fields[0], fields[1], ts});
    }
  }

  if (!unknown.empty()) {
    std::ostringstream msg;
    msg << interactions_file.string() << ": events reference "
        << unknown.size() << " unknown item_id(s):";
    std::size_t shown = 0;
    for (const auto& id : unknown) {
      if (shown == 20) {
        msg << " ... and " << unknown.size() - shown << " more";
        break;
      }
      msg << ' ' << id;
      ++shown;
    }
    throw ValidationError(msg.str());
  }
  return log;
}

InteractionLog filter_rare_genres(const InteractionLog& log,
                                  std::size_t min_interactions) {
  std::unordered_map<std::string, std::size_t> genre_counts;
  for (const auto& e : log.events) {
    auto it = log.items.find(e.item);
    if (it == log.items.end()) continue;
    for (const auto& genre : it->second.genres) ++genre_counts[genre];
  }

  InteractionLog out;
  for (const auto& [id, info] : log.items) {
    // Items with no genres are untouched by a genre threshold.
    bool keep = info.genres.empty();
    for (const auto& genre : info.genres) {
      auto it = genre_counts.find(genre);
      if (it != genre_counts.end() && it->second >= min_interactions) {
        keep = true;
        break;
      }
    }
    if (keep) out.items.emplace(id, info);
  }
  for (const auto& e : log.events)
    if (out.items.count(e.item)) out.events.push_back(e);
  return out;
}

PeriodSplit split_periods(const InteractionLog& log) {
  if (log.events.size() < static_cast<std::size_t>(kNumPeriods))
    throw ValidationError("insufficient events for period split: " +
                          std::to_string(log.events.size()) + " < " +
                          std::to_string(kNumPeriods));
  std::vector<Event> sorted = log.events;
  std::sort(sorted.begin(), sorted.end(), event_order);

  PeriodSplit split;
  split.periods.resize(kNumPeriods);
  const std::size_t n = sorted.size();
  const std::size_t base = n / kNumPeriods;
  const std::size_t remainder = n % kNumPeriods;
  std::size_t cursor = 0;
  for (int p = 0; p < kNumPeriods; ++p) {
    const std::size_t bucket =
        base + (static_cast<std::size_t>(p) < remainder ? 1 : 0);
    split.periods[p].assign(sorted.begin() + cursor,
                            sorted.begin() + cursor + bucket);
    cursor += bucket;
  }
  return split;
}

std::vector<Sequence> build_sequences(const PeriodSplit& split, int max_len) {
  if (max_len < 1) throw ValidationError("max_len must be >= 1");
  std::vector<Sequence> sequences;
  std::unordered_map<UserId, std::deque<ItemId>> history;
  std::size_t ref = 0;
  for (int p = 0; p < static_cast<int>(split.periods.size()); ++p) {
    const SplitPart part = split.part_of(p);
    for (const Event& e : split.periods[p]) {
      auto& prior = history[e.user];
      if (!prior.empty()) {
        Sequence seq;
        seq.ref = std::to_string(ref++);
        seq.user = e.user;
        seq.history.assign(prior.begin(), prior.end());
        seq.target = e.item;
        seq.split = part;
        sequences.push_back(std::move(seq));
      }
      prior.push_back(e.item);
      if (prior.size() > static_cast<std::size_t>(max_len)) prior.pop_front();
    }
  }
  return sequences;
}

SampleDraw draw_training_sample(const std::vector<Sequence>& sequences,
                                std::size_t size, std::uint64_t seed) {
  if (size < 1) throw ValidationError("sample size must be >= 1");
  SampleDraw draw;
  draw.seed = seed;
  draw.size = size;
  if (sequences.size() <= size) {
    draw.sequences = sequences;
    return draw;
  }
  // Partial Fisher-Yates over indices, then restore input order.
  std::vector<std::size_t> indices(sequences.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + rng.below(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(size);
  std::sort(indices.begin(), indices.end());
  draw.sequences.reserve(size);
  for (const std::size_t i : indices) draw.sequences.push_back(sequences[i]);
  return draw;
}

void write_sequences_jsonl(const std::vector<Sequence>& sequences,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write sequences file: " + path.string());
  for (const auto& seq : sequences) {
    nlohmann::ordered_json j;
    j["user_id"] = seq.user;
    j["history"] = seq.history;
    j["target"] = seq.target;
    j["split"] = to_string(seq.split);
    out << j.dump() << '\n';
  }
}

std::vector<Sequence> read_sequences_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("sequences file not found: " + path.string());
  std::vector<Sequence> sequences;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(index + 1) +
                            ": bad sequence JSON: " + e.what());
    }
    Sequence seq;
    seq.ref = std::to_string(index++);
    seq.user = j.at("user_id").get<std::string>();
    seq.history = j.at("history").get<std::vector<ItemId>>();
    seq.target = j.at("target").get<ItemId>();
    seq.split = split_part_from_string(j.at("split").get<std::string>());
    if (seq.history.empty())
      throw ValidationError(path.string() + ":" + std::to_string(index) +
                            ": sequence has an empty history");
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

}  // namespace ifair
