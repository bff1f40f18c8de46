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

#ifndef IFAIR_METRICS_HPP_
#define IFAIR_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ifair/grouping.hpp"
#include "ifair/types.hpp"

namespace ifair {

// One ordered top-K recommendation list for one evaluated sequence.
struct Slate {
  SequenceRef sequence_ref;
  std::vector<ItemId> ranked_items;  // best first, no duplicates
};

// Interaction proportion GH(G): membership counts of history items in G over
// membership counts across all groups. Items with no group membership do not
// count on either side. Throws ValidationError when nothing is grouped.
std::map<GroupLabel, double> gh(const std::vector<std::vector<ItemId>>& histories,
                                const GroupScheme& scheme);

// Recommendation proportion GP(G) over the top-k prefix of every slate.
// Slates shorter than k contribute their full length; when short_slates is
// given it receives how many were short.
std::map<GroupLabel, double> gp(const std::vector<Slate>& slates,
                                const GroupScheme& scheme, int k,
                                std::size_t* short_slates = nullptr);

// GU(G) = GP(G) - GH(G). The two maps must cover the same groups.
std::map<GroupLabel, double> group_unfairness(
    const std::map<GroupLabel, double>& gh_values,
    const std::map<GroupLabel, double>& gp_values);

// Mean absolute GU across groups.
double mgu(const std::map<GroupLabel, double>& gu);

// Spread between the maximum and minimum GU.
double dgu(const std::map<GroupLabel, double>& gu);

struct Accuracy {
  double ndcg = 0.0;
  double hr = 0.0;
};

// All-ranking accuracy at k. HR@k is the fraction of slates whose top-k
// holds the target; NDCG@k uses binary gain, 1/log2(rank+1) with rank
// starting at 1. Slates and targets are aligned one-to-one.
Accuracy accuracy(const std::vector<Slate>& slates,
                  const std::vector<ItemId>& targets, int k);

struct FairnessReport {
  std::string scheme;
  int k = 0;
  std::map<GroupLabel, double> gh;
  std::map<GroupLabel, double> gp;
  std::map<GroupLabel, double> gu;
  double mgu = 0.0;
  double dgu = 0.0;
  double ndcg = 0.0;
  double hr = 0.0;
  std::size_t short_slate_warnings = 0;
};

// Full report at one k: fairness from (histories, slates), accuracy from
// (slates, targets).
FairnessReport evaluate(const std::vector<std::vector<ItemId>>& histories,
                        const std::vector<Slate>& slates,
                        const std::vector<ItemId>& targets,
                        const GroupScheme& scheme, int k);

std::string report_to_json(const FairnessReport& report);
FairnessReport report_from_json(const std::string& text);

// CSV companion: one row per group plus one summary row.
void write_report_csv(const std::vector<FairnessReport>& reports,
                      const std::filesystem::path& path);

void write_slates_jsonl(const std::vector<Slate>& slates,
                        const std::filesystem::path& path);
std::vector<Slate> read_slates_jsonl(const std::filesystem::path& path);

}  // namespace ifair

#endif  // IFAIR_METRICS_HPP_
