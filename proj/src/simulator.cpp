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

#include "ifair/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "ifair/rng.hpp"

namespace ifair {

namespace {

// Distinct generator streams so each stage is independently reproducible.
constexpr std::uint64_t kLogStream = 0x6c6f672d73747231ULL;
constexpr std::uint64_t kEmbeddingStream = 0x656d622d73747232ULL;
constexpr std::uint64_t kOracleStream = 0x6f72632d73747233ULL;

std::string padded(const char* prefix, std::size_t index, std::size_t total) {
  std::size_t width = 1;
  for (std::size_t v = total; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  return std::string(prefix) + std::string(width - std::min(width, digits.size()), '0') +
         digits;
}

// Inverse-CDF draw over explicit cumulative weights.
std::size_t draw_cumulative(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()),
                  cumulative.size() - 1);
}

}  // namespace

void SimConfig::validate() const {
  if (n_items < 1 || n_users < 1 || n_events < 1 || n_genres < 1 || embed_dim < 1)
    throw ValidationError("simulator counts must all be >= 1");
  if (!(oracle_bias >= 0.0 && oracle_bias <= 1.0))
    throw ValidationError("oracle_bias must lie in [0, 1]");
  if (!(popularity_exponent >= 0.0) || !std::isfinite(popularity_exponent))
    throw ValidationError("popularity_exponent must be finite and >= 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ValidationError("noise_sigma must be finite and >= 0");
}

InteractionLog generate_log(const SimConfig& config) {
  config.validate();
  Rng rng(config.seed ^ kLogStream);

  std::vector<GroupLabel> genres;
  genres.reserve(config.n_genres);
  for (std::size_t g = 1; g <= config.n_genres; ++g)
    genres.push_back(padded("g", g, config.n_genres));

  InteractionLog log;
  std::vector<ItemId> item_ids;
  item_ids.reserve(config.n_items);
  // Item rank equals its index: i0001 carries the largest draw weight.
  for (std::size_t i = 1; i <= config.n_items; ++i) {
    const ItemId id = padded("i", i, config.n_items);
    ItemInfo info;
    info.title = "sim title " + id;
    const std::size_t n_genres = 1 + rng.below(2);
    std::set<std::string> chosen;
    while (chosen.size() < std::min(n_genres, config.n_genres))
      chosen.insert(genres[rng.below(config.n_genres)]);
    info.genres.assign(chosen.begin(), chosen.end());
    log.items.emplace(id, std::move(info));
    item_ids.push_back(id);
  }

  std::vector<double> cumulative(config.n_items);
  double total = 0.0;
  for (std::size_t r = 0; r < config.n_items; ++r) {
    total += std::pow(static_cast<double>(r + 1), -config.popularity_exponent);
    cumulative[r] = total;
  }

  log.events.reserve(config.n_events);
  for (std::size_t e = 0; e < config.n_events; ++e) {
    Event event;
    event.user = padded("u", 1 + rng.below(config.n_users), config.n_users);
    event.item = item_ids[draw_cumulative(rng, cumulative)];
    event.timestamp = static_cast<std::int64_t>(e + 1);
    log.events.push_back(std::move(event));
  }
  return log;
}

EmbeddingTable generate_embeddings(const InteractionLog& log,
                                   const SimConfig& config) {
  config.validate();
  Rng rng(config.seed ^ kEmbeddingStream);
  const std::size_t dim = config.embed_dim;

  std::set<GroupLabel> genre_set;
  for (const auto& [id, info] : log.items)
    genre_set.insert(info.genres.begin(), info.genres.end());

  std::unordered_map<GroupLabel, std::vector<double>> centroids;
  for (const auto& genre : genre_set) {
    std::vector<double> centroid(dim);
    double norm = 0.0;
    for (auto& component : centroid) {
      component = rng.gauss();
      norm += component * component;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (auto& component : centroid) component /= norm;
    centroids.emplace(genre, std::move(centroid));
  }

  std::vector<std::pair<ItemId, std::vector<float>>> vectors;
  vectors.reserve(log.items.size());
  for (const auto& [id, info] : log.items) {
    std::vector<double> mean(dim, 0.0);
    if (!info.genres.empty()) {
      for (const auto& genre : info.genres) {
        const auto& centroid = centroids.at(genre);
        for (std::size_t d = 0; d < dim; ++d) mean[d] += centroid[d];
      }
      for (auto& component : mean)
        component /= static_cast<double>(info.genres.size());
    }
    std::vector<float> vec(dim);
    for (std::size_t d = 0; d < dim; ++d)
      vec[d] = static_cast<float>(mean[d] + config.noise_sigma * rng.gauss());
    vectors.emplace_back(id, std::move(vec));
  }
  return EmbeddingTable(dim, std::move(vectors));
}

std::vector<OracleEmbedding> generate_oracles(
    const std::vector<Sequence>& sequences, const EmbeddingTable& table,
    const SimConfig& config) {
  config.validate();
  Rng rng(config.seed ^ kOracleStream);
  const std::size_t dim = table.dim();
  const double oracle_sigma = 0.1 * config.noise_sigma;

  // Popularity counted over the given sequences. The biased draw goes with
  // the squared count: organic targets already follow the plain count
  // distribution, so matching it would leave the slates calibrated; squaring
  // concentrates the pull on the head the way an over-recommending generator
  // does.
  std::unordered_map<ItemId, double> counts;
  for (const auto& seq : sequences) {
    for (const auto& item : seq.history) counts[item] += 1.0;
    counts[seq.target] += 1.0;
  }
  std::vector<double> cumulative(table.size());
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto it = counts.find(table.ids()[i]);
    const double count = it == counts.end() ? 0.0 : it->second;
    total += count * count;
    cumulative[i] = total;
  }
  if (!sequences.empty() && total <= 0.0)
    throw ValidationError("no sequence item has an embedding; cannot bias oracles");

  std::vector<OracleEmbedding> oracles;
  oracles.reserve(sequences.size());
  for (const auto& seq : sequences) {
    const bool biased = rng.uniform() < config.oracle_bias;
    std::size_t row;
    if (biased) {
      row = draw_cumulative(rng, cumulative);
    } else {
      row = table.index_of(seq.target);
      if (row == table.size())
        throw ValidationError("sequence " + seq.ref + ": target " + seq.target +
                              " has no embedding");
    }
    const auto source = table.vector_of(row);
    OracleEmbedding oracle;
    oracle.sequence_ref = seq.ref;
    oracle.vector.resize(dim);
    for (std::size_t d = 0; d < dim; ++d)
      oracle.vector[d] = static_cast<float>(static_cast<double>(source[d]) +
                                            oracle_sigma * rng.gauss());
    oracles.push_back(std::move(oracle));
  }
  return oracles;
}

}  // namespace ifair
