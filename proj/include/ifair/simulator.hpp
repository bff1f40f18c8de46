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

#ifndef IFAIR_SIMULATOR_HPP_
#define IFAIR_SIMULATOR_HPP_

#include <cstdint>
#include <vector>

#include "ifair/grounding.hpp"
#include "ifair/types.hpp"

namespace ifair {

// Synthetic stand-in for a popularity-skewed generative recommender. All
// generators are pure functions of (config, seed).
struct SimConfig {
  std::size_t n_items = 1000;
  std::size_t n_users = 200;
  std::size_t n_events = 50000;
  std::size_t n_genres = 8;
  std::size_t embed_dim = 16;
  double popularity_exponent = 1.0;  // item draw weight rank^(-exponent)
  double oracle_bias = 0.0;          // probability an oracle ignores the target
  double noise_sigma = 0.1;          // embedding noise around genre centroids
  std::uint64_t seed = 0;

  void validate() const;
};

// Items get 1-2 genres each; events draw items with weight rank^(-exponent)
// and carry strictly increasing timestamps.
InteractionLog generate_log(const SimConfig& config);

// One random unit centroid per genre; an item's vector is the mean of its
// genres' centroids plus Gaussian noise of noise_sigma per component.
EmbeddingTable generate_embeddings(const InteractionLog& log,
                                   const SimConfig& config);

// Per sequence: with probability 1-beta the true target's embedding, else the
// embedding of an item drawn with probability proportional to its squared
// interaction count (counted over the given sequences), either way plus small
// noise (a tenth of noise_sigma). Throws ValidationError when a target lacks
// an embedding.
std::vector<OracleEmbedding> generate_oracles(
    const std::vector<Sequence>& sequences, const EmbeddingTable& table,
    const SimConfig& config);

}  // namespace ifair

#endif  // IFAIR_SIMULATOR_HPP_
