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

#ifndef IFAIR_RERANK_HPP_
#define IFAIR_RERANK_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ifair/grounding.hpp"
#include "ifair/grouping.hpp"
#include "ifair/metrics.hpp"
#include "ifair/types.hpp"

namespace ifair {

struct RerankConfig {
  std::vector<int> k_set = {1, 5, 10, 20};  // nonempty, strictly increasing
  double alpha = 0.0;                       // punishment exponent, >= 0
  double epsilon = 1e-6;                    // clamp margin for per-item punishment

  void validate() const;
  // gamma_K = K / sum of k_set, keyed by K; sums to 1.
  std::map<int, double> gammas() const;
};

// Group punishments from validation unfairness plus their per-item spread.
// Values stay unclamped here; the clamp applies inside rerank only.
struct PunishmentTable {
  std::map<GroupLabel, double> raw;         // U_G
  std::map<GroupLabel, double> normalized;  // U_G scaled into [-1, 1]
  std::map<ItemId, double> per_item;        // mean of the item's group values
  std::vector<int> k_set;
  std::string source = "validation";

  std::string to_json() const;
  static PunishmentTable from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static PunishmentTable load(const std::filesystem::path& path);
};

// U_G = sum over K in k_set of gamma_K * GU(G)@K. The map must provide every
// K of the k_set; a missing K raises ValidationError naming it.
std::map<GroupLabel, double> punishment_raw(
    const std::map<int, std::map<GroupLabel, double>>& validation_gu_at_k,
    const RerankConfig& config);

// Scales by the largest absolute value; an all-zero input stays all zero.
std::map<GroupLabel, double> punishment_normalize(
    const std::map<GroupLabel, double>& raw);

// Per-item punishment: mean of the item's group values, zero for items
// without groups.
std::map<ItemId, double> punishment_items(
    const std::map<GroupLabel, double>& normalized, const GroupScheme& scheme);

PunishmentTable build_punishment_table(
    const std::map<int, std::map<GroupLabel, double>>& validation_gu_at_k,
    const GroupScheme& scheme, const RerankConfig& config);

// Adjusted distance per item: D / (1 - min(U_i, 1 - epsilon))^alpha, then the
// top-k by (adjusted distance, item id). Items absent from the table carry
// zero punishment.
Slate rerank(const std::map<ItemId, double>& item_distances,
             const PunishmentTable& table, const RerankConfig& config, int k,
             SequenceRef sequence_ref = {});

// Grounds and reranks a batch of oracles in input order.
std::vector<Slate> rerank_batch(const EmbeddingTable& table,
                                const std::vector<OracleEmbedding>& oracles,
                                const PunishmentTable& punishment,
                                const RerankConfig& config, int k);

struct SweepInputs {
  const EmbeddingTable& table;
  const std::vector<OracleEmbedding>& oracles;        // validation set
  const std::vector<std::vector<ItemId>>& histories;  // aligned with oracles
  const std::vector<ItemId>& targets;                 // aligned with oracles
  const GroupScheme& scheme;
  RerankConfig config;  // k_set and epsilon; alpha comes from the sweep
};

struct SweepPoint {
  double alpha = 0.0;
  std::vector<FairnessReport> reports;  // one per K in k_set
  double ndcg5 = 0.0;
  double hr5 = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // input alpha order
  PunishmentTable punishment;      // built once from the alpha = 0 slates
  double baseline_ndcg5 = 0.0;     // accuracy of the uncalibrated grounding
  double selected_alpha = 0.0;
  std::size_t selected_index = 0;
};

// Builds the punishment table from the uncalibrated validation slates, then
// reranks and scores the validation set at every alpha. The selected alpha
// minimizes MGU at the largest K among candidates whose NDCG@5 is within 5%
// relative of the uncalibrated value; if none qualifies the highest-NDCG
// point wins.
SweepResult sweep_alpha(const SweepInputs& inputs,
                        const std::vector<double>& alphas);

// One CSV row per alpha with all fairness and accuracy columns.
void write_sweep_csv(const SweepResult& result,
                     const std::filesystem::path& path);

}  // namespace ifair

#endif  // IFAIR_RERANK_HPP_
