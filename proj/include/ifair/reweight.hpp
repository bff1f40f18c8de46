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

#ifndef IFAIR_REWEIGHT_HPP_
#define IFAIR_REWEIGHT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ifair/grouping.hpp"
#include "ifair/types.hpp"

namespace ifair {

// In-learning calibration weights. Group weights follow
// W_G = GH_tr(G) / GH_ta(G); each sample weight is the mean of its target's
// group weights. Immutable once built.
struct WeightTable {
  std::string scheme;
  std::map<GroupLabel, double> group_weights;
  std::map<SequenceRef, double> sample_weights;
  // Snapshots the weights were derived from.
  std::map<GroupLabel, double> gh_tr;
  std::map<GroupLabel, double> gh_ta;
  std::vector<std::string> warnings;
};

// Splits index-aligned training sequences into their histories and targets.
// Rejects sequences from other splits.
std::pair<std::vector<std::vector<ItemId>>, std::vector<ItemId>> split_tr_ta(
    const std::vector<Sequence>& sequences);

// W_G per group. Groups absent from the targets (gh_ta of zero) get weight 1,
// recorded as a warning; no sample consumes such a weight.
std::map<GroupLabel, double> group_weights(
    const std::map<GroupLabel, double>& gh_tr,
    const std::map<GroupLabel, double>& gh_ta,
    std::vector<std::string>* warnings = nullptr);

// W_i per sample: the mean of the target's group weights. Targets belonging
// to no group get weight 1, recorded as a warning.
std::map<SequenceRef, double> sample_weights(
    const std::vector<std::pair<SequenceRef, ItemId>>& targets,
    const GroupScheme& scheme,
    const std::map<GroupLabel, double>& group_weights,
    std::vector<std::string>* warnings = nullptr);

// Composes the steps above over one set of training sequences.
WeightTable build_weight_table(const std::vector<Sequence>& sequences,
                               const GroupScheme& scheme);

// Sum of W_i * loss_i. Exported as a plain sum; dividing by the sample count
// for a mean is the trainer's choice. Throws ValidationError naming the first
// loss key that has no weight.
double weighted_loss(const std::map<SequenceRef, double>& per_sample_losses,
                     const WeightTable& weights);

// TSV `sequence_ref\tweight` with comment header lines carrying the scheme
// name, group weights and generator seed.
void write_weights_tsv(const WeightTable& table, std::uint64_t seed,
                       const std::filesystem::path& path);

}  // namespace ifair

#endif  // IFAIR_REWEIGHT_HPP_
