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

#include "ifair/reweight.hpp"

#include <cstdio>
#include <fstream>

#include "ifair/metrics.hpp"

namespace ifair {

std::pair<std::vector<std::vector<ItemId>>, std::vector<ItemId>> split_tr_ta(
    const std::vector<Sequence>& sequences) {
  if (sequences.empty())
    throw ValidationError("split_tr_ta needs at least one sequence");
  std::vector<std::vector<ItemId>> histories;
  std::vector<ItemId> targets;
  histories.reserve(sequences.size());
  targets.reserve(sequences.size());
  for (const auto& seq : sequences) {
    if (seq.split != SplitPart::train)
      throw ValidationError("sequence " + seq.ref +
                            " is not a training sequence (split=" +
                            to_string(seq.split) + ")");
    histories.push_back(seq.history);
    targets.push_back(seq.target);
  }
  return {std::move(histories), std::move(targets)};
}

std::map<GroupLabel, double> group_weights(
    const std::map<GroupLabel, double>& gh_tr,
    const std::map<GroupLabel, double>& gh_ta,
    std::vector<std::string>* warnings) {
  if (gh_tr.size() != gh_ta.size())
    throw ValidationError("gh_tr and gh_ta cover different group sets");
  std::map<GroupLabel, double> weights;
  for (const auto& [group, ta] : gh_ta) {
    auto it = gh_tr.find(group);
    if (it == gh_tr.end())
      throw ValidationError("group " + group + " present in gh_ta but not gh_tr");
    if (ta < 0.0)
      throw ValidationError("gh_ta(" + group + ") is negative");
    if (ta == 0.0) {
      // No target lies in this group, so the weight is never consumed.
      weights[group] = 1.0;
      if (warnings)
        warnings->push_back("group " + group +
                            " has no target items; weight defaulted to 1");
    } else {
      weights[group] = it->second / ta;
    }
  }
  return weights;
}

std::map<SequenceRef, double> sample_weights(
    const std::vector<std::pair<SequenceRef, ItemId>>& targets,
    const GroupScheme& scheme,
    const std::map<GroupLabel, double>& group_weights,
    std::vector<std::string>* warnings) {
  std::map<SequenceRef, double> out;
  for (const auto& [ref, target] : targets) {
    const auto& groups = scheme.groups_of(target);
    if (groups.empty()) {
      out[ref] = 1.0;
      if (warnings)
        warnings->push_back("target of sequence " + ref +
                            " belongs to no group; weight defaulted to 1");
      continue;
    }
    double sum = 0.0;
    for (const auto& group : groups) {
      auto it = group_weights.find(group);
      if (it == group_weights.end())
        throw ValidationError("no group weight for " + group);
      sum += it->second;
    }
    out[ref] = sum / static_cast<double>(groups.size());
  }
  return out;
}

WeightTable build_weight_table(const std::vector<Sequence>& sequences,
                               const GroupScheme& scheme) {
  auto [histories, targets] = split_tr_ta(sequences);
  WeightTable table;
  table.scheme = scheme.name();
  table.gh_tr = gh(histories, scheme);
  std::vector<std::vector<ItemId>> target_lists;
  target_lists.reserve(targets.size());
  for (const auto& target : targets) target_lists.push_back({target});
  table.gh_ta = gh(target_lists, scheme);
  table.group_weights = group_weights(table.gh_tr, table.gh_ta, &table.warnings);
  std::vector<std::pair<SequenceRef, ItemId>> keyed;
  keyed.reserve(sequences.size());
  for (const auto& seq : sequences) keyed.emplace_back(seq.ref, seq.target);
  table.sample_weights =
      sample_weights(keyed, scheme, table.group_weights, &table.warnings);
  return table;
}

double weighted_loss(const std::map<SequenceRef, double>& per_sample_losses,
                     const WeightTable& weights) {
  double sum = 0.0;
  for (const auto& [ref, loss] : per_sample_losses) {
    auto it = weights.sample_weights.find(ref);
    if (it == weights.sample_weights.end())
      throw ValidationError("no sample weight for sequence " + ref);
    sum += it->second * loss;
  }
  return sum;
}

void write_weights_tsv(const WeightTable& table, std::uint64_t seed,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write weights file: " + path.string());
  char buf[32];
  out << "# scheme: " << table.scheme << '\n';
  out << "# seed: " << seed << '\n';
  out << "# group_weights:";
  for (const auto& [group, w] : table.group_weights) {
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    out << ' ' << group << '=' << buf;
  }
  out << '\n';
  // The weighted loss is a plain sum of W_i * loss_i; whether a trainer
  // divides by the batch size or by the weight sum is its own convention.
  out << "# loss_convention: sum(W_i * loss_i); mean normalization is the "
         "trainer's choice\n";
  out << "sequence_ref\tweight\n";
  for (const auto& [ref, w] : table.sample_weights) {
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    out << ref << '\t' << buf << '\n';
  }
}

}  // namespace ifair
