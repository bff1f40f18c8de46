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

#include "ifair/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

namespace ifair {

namespace {

// Shared counting core of Eq-style proportions: membership counts per group
// over the total membership count. Ungrouped items contribute to neither.
std::map<GroupLabel, double> proportions(
    const std::vector<std::vector<ItemId>>& lists, const GroupScheme& scheme,
    const char* what) {
  std::map<GroupLabel, std::size_t> counts;
  for (const auto& group : scheme.groups()) counts[group] = 0;
  std::size_t total = 0;
  for (const auto& list : lists) {
    for (const auto& item : list) {
      for (const auto& group : scheme.groups_of(item)) {
        ++counts[group];
        ++total;
      }
    }
  }
  if (total == 0)
    throw ValidationError(std::string("no grouped ") + what +
                          " under scheme '" + scheme.name() + "'");
  std::map<GroupLabel, double> out;
  for (const auto& [group, count] : counts)
    out[group] = static_cast<double>(count) / static_cast<double>(total);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::ordered_json map_to_json(const std::map<GroupLabel, double>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<GroupLabel, double> map_from_json(const nlohmann::json& j) {
  std::map<GroupLabel, double> m;
  for (const auto& [k, v] : j.items()) m[k] = v.get<double>();
  return m;
}

}  // namespace

std::map<GroupLabel, double> gh(const std::vector<std::vector<ItemId>>& histories,
                                const GroupScheme& scheme) {
  return proportions(histories, scheme, "interactions");
}

std::map<GroupLabel, double> gp(const std::vector<Slate>& slates,
                                const GroupScheme& scheme, int k,
                                std::size_t* short_slates) {
  if (k < 1) throw ValidationError("gp requires k >= 1");
  std::vector<std::vector<ItemId>> prefixes;
  prefixes.reserve(slates.size());
  std::size_t short_count = 0;
  for (const auto& slate : slates) {
    const std::size_t take =
        std::min(slate.ranked_items.size(), static_cast<std::size_t>(k));
    if (take < static_cast<std::size_t>(k)) ++short_count;
    prefixes.emplace_back(slate.ranked_items.begin(),
                          slate.ranked_items.begin() + take);
  }
  if (short_slates) *short_slates = short_count;
  return proportions(prefixes, scheme, "recommendations");
}

std::map<GroupLabel, double> group_unfairness(
    const std::map<GroupLabel, double>& gh_values,
    const std::map<GroupLabel, double>& gp_values) {
  if (gh_values.size() != gp_values.size())
    throw ValidationError("gh and gp cover different group sets");
  std::map<GroupLabel, double> gu;
  for (const auto& [group, p] : gp_values) {
    auto it = gh_values.find(group);
    if (it == gh_values.end())
      throw ValidationError("group " + group + " present in gp but not gh");
    gu[group] = p - it->second;
  }
  return gu;
}

double mgu(const std::map<GroupLabel, double>& gu) {
  if (gu.empty()) throw ValidationError("mgu of an empty group map");
  double sum = 0.0;
  for (const auto& [group, value] : gu) sum += std::fabs(value);
  return sum / static_cast<double>(gu.size());
}

double dgu(const std::map<GroupLabel, double>& gu) {
  if (gu.empty()) throw ValidationError("dgu of an empty group map");
  double lo = gu.begin()->second;
  double hi = gu.begin()->second;
  for (const auto& [group, value] : gu) {
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  return hi - lo;
}

Accuracy accuracy(const std::vector<Slate>& slates,
                  const std::vector<ItemId>& targets, int k) {
  if (slates.size() != targets.size())
    throw ValidationError("accuracy: " + std::to_string(slates.size()) +
                          " slates vs " + std::to_string(targets.size()) +
                          " targets");
  if (k < 1) throw ValidationError("accuracy requires k >= 1");
  if (slates.empty()) return {};
  double ndcg_sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < slates.size(); ++i) {
    const auto& items = slates[i].ranked_items;
    const std::size_t limit =
        std::min(items.size(), static_cast<std::size_t>(k));
    for (std::size_t r = 0; r < limit; ++r) {
      if (items[r] == targets[i]) {
        ++hits;
        ndcg_sum += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        break;
      }
    }
  }
  const double n = static_cast<double>(slates.size());
  return {ndcg_sum / n, static_cast<double>(hits) / n};
}

FairnessReport evaluate(const std::vector<std::vector<ItemId>>& histories,
                        const std::vector<Slate>& slates,
                        const std::vector<ItemId>& targets,
                        const GroupScheme& scheme, int k) {
  FairnessReport report;
  report.scheme = scheme.name();
  report.k = k;
  report.gh = gh(histories, scheme);
  report.gp = gp(slates, scheme, k, &report.short_slate_warnings);
  report.gu = group_unfairness(report.gh, report.gp);
  report.mgu = mgu(report.gu);
  report.dgu = dgu(report.gu);
  const Accuracy acc = accuracy(slates, targets, k);
  report.ndcg = acc.ndcg;
  report.hr = acc.hr;
  return report;
}

std::string report_to_json(const FairnessReport& report) {
  nlohmann::ordered_json j;
  j["scheme"] = report.scheme;
  j["k"] = report.k;
  j["gh"] = map_to_json(report.gh);
  j["gp"] = map_to_json(report.gp);
  j["gu"] = map_to_json(report.gu);
  j["mgu"] = report.mgu;
  j["dgu"] = report.dgu;
  j["ndcg"] = report.ndcg;
  j["hr"] = report.hr;
  return j.dump();
}

FairnessReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report JSON parse failure: ") + e.what());
  }
  FairnessReport report;
  report.scheme = j.at("scheme").get<std::string>();
  report.k = j.at("k").get<int>();
  report.gh = map_from_json(j.at("gh"));
  report.gp = map_from_json(j.at("gp"));
  report.gu = map_from_json(j.at("gu"));
  report.mgu = j.at("mgu").get<double>();
  report.dgu = j.at("dgu").get<double>();
  report.ndcg = j.at("ndcg").get<double>();
  report.hr = j.at("hr").get<double>();
  return report;
}

void write_report_csv(const std::vector<FairnessReport>& reports,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write report CSV: " + path.string());
  out << "scheme,k,group,gh,gp,gu,mgu,dgu,ndcg,hr\n";
  for (const auto& report : reports) {
    for (const auto& [group, value] : report.gu) {
      out << report.scheme << ',' << report.k << ',' << group << ','
          << format_double(report.gh.at(group)) << ','
          << format_double(report.gp.at(group)) << ',' << format_double(value)
          << ",,,,\n";
    }
    out << report.scheme << ',' << report.k << ",ALL,,,,"
        << format_double(report.mgu) << ',' << format_double(report.dgu) << ','
        << format_double(report.ndcg) << ',' << format_double(report.hr)
        << '\n';
  }
}

void write_slates_jsonl(const std::vector<Slate>& slates,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write slates file: " + path.string());
  for (const auto& slate : slates) {
    nlohmann::ordered_json j;
    j["sequence_ref"] = slate.sequence_ref;
    j["items"] = slate.ranked_items;
    out << j.dump() << '\n';
  }
}

std::vector<Slate> read_slates_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("slates file not found: " + path.string());
  std::vector<Slate> slates;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": bad slate JSON: " + e.what());
    }
    Slate slate;
    slate.sequence_ref = j.at("sequence_ref").get<std::string>();
    slate.ranked_items = j.at("items").get<std::vector<ItemId>>();
    std::set<ItemId> unique(slate.ranked_items.begin(), slate.ranked_items.end());
    if (unique.size() != slate.ranked_items.size())
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": slate contains duplicate items");
    slates.push_back(std::move(slate));
  }
  return slates;
}

}  // namespace ifair
