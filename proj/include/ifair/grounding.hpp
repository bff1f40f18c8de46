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

#ifndef IFAIR_GROUNDING_HPP_
#define IFAIR_GROUNDING_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ifair/metrics.hpp"
#include "ifair/types.hpp"

namespace ifair {

// Per-item dense vectors, id-sorted and immutable. Shareable across threads.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim,
                 std::vector<std::pair<ItemId, std::vector<float>>> vectors);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<ItemId>& ids() const { return ids_; }
  std::span<const float> vector_of(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }
  // Index of an item id, or size() if absent.
  std::size_t index_of(const ItemId& id) const;

  // Binary format: magic "IFEMB1", u32 LE count, u32 LE dim, then per record
  // u32 LE id length, id bytes, dim little-endian f32 components. A TSV
  // alternative (item_id\tv0\tv1...) is accepted for small fixtures.
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

 private:
  std::size_t dim_;
  std::vector<ItemId> ids_;     // ascending
  std::vector<float> data_;     // row-major, aligned with ids_
  std::map<ItemId, std::size_t> index_;
};

// One generated vector per evaluated sequence.
struct OracleEmbedding {
  SequenceRef sequence_ref;
  std::vector<float> vector;
};

// L2 distance of every item to the oracle. Throws ValidationError naming
// both dimensions on mismatch.
std::map<ItemId, double> distances(const EmbeddingTable& table,
                                   const OracleEmbedding& oracle);

// The k nearest items by (L2 distance, item id). 1 <= k <= table size.
Slate ground(const EmbeddingTable& table, const OracleEmbedding& oracle, int k);

// Element-wise ground over a batch, evaluated concurrently but emitted in
// input order. The first per-oracle error carries the oracle's index.
std::vector<Slate> ground_batch(const EmbeddingTable& table,
                                const std::vector<OracleEmbedding>& oracles,
                                int k);

// Oracle files share the embedding formats, keyed by sequence_ref.
void save_oracles(const std::vector<OracleEmbedding>& oracles, std::size_t dim,
                  const std::filesystem::path& path);
std::vector<OracleEmbedding> load_oracles(const std::filesystem::path& path);

}  // namespace ifair

#endif  // IFAIR_GROUNDING_HPP_
