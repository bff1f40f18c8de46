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

#include "ifair/grounding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ifair/parallel.hpp"

namespace ifair {

namespace {

constexpr char kMagic[6] = {'I', 'F', 'E', 'M', 'B', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw ValidationError("truncated embedding file: " + path.string());
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

float get_f32(std::istream& in, const std::filesystem::path& path) {
  const std::uint32_t bits = get_u32(in, path);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void write_records(const std::filesystem::path& path, std::size_t dim,
                   const std::vector<std::pair<std::string, const float*>>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write embedding file: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(records.size()));
  put_u32(out, static_cast<std::uint32_t>(dim));
  for (const auto& [id, data] : records) {
    put_u32(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (std::size_t d = 0; d < dim; ++d) put_f32(out, data[d]);
  }
  if (!out) throw ValidationError("write failure: " + path.string());
}

std::vector<std::pair<std::string, std::vector<float>>> read_records(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("embedding file not found: " + path.string());
  char magic[sizeof(kMagic)];
  const bool is_binary =
      in.read(magic, sizeof(magic)) && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0;
  std::vector<std::pair<std::string, std::vector<float>>> records;
  if (is_binary) {
    const std::uint32_t count = get_u32(in, path);
    const std::uint32_t dim = get_u32(in, path);
    if (dim == 0) throw ValidationError("embedding dim 0 in " + path.string());
    records.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t id_len = get_u32(in, path);
      std::string id(id_len, '\0');
      if (!in.read(id.data(), id_len))
        throw ValidationError("truncated embedding file: " + path.string());
      std::vector<float> vec(dim);
      for (std::uint32_t d = 0; d < dim; ++d) vec[d] = get_f32(in, path);
      records.emplace_back(std::move(id), std::move(vec));
    }
    return records;
  }

  // TSV fallback: item_id then components, optional header line.
  in.clear();
  in.seekg(0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("item_id\t", 0) == 0) continue;
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
    if (fields.size() < 2)
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": embedding row needs an id and components");
    std::vector<float> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      float v = 0.0f;
      const auto [ptr, ec] =
          std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc{} || ptr != fields[i].data() + fields[i].size())
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": bad component '" + fields[i] + "'");
      vec.push_back(v);
    }
    records.emplace_back(fields[0], std::move(vec));
  }
  return records;
}

void check_dims(const EmbeddingTable& table, const OracleEmbedding& oracle) {
  if (oracle.vector.size() != table.dim())
    throw ValidationError("oracle '" + oracle.sequence_ref + "' has dim " +
                          std::to_string(oracle.vector.size()) +
                          ", table has dim " + std::to_string(table.dim()));
}

double squared_distance(std::span<const float> a, const std::vector<float>& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
    sum += diff * diff;
  }
  return sum;
}

// Indices of the k nearest rows. Ranking uses the true L2 value (not the
// squared form) so that the rerank path, which scales these same values,
// reproduces grounding bitwise at a punishment exponent of zero. Index order
// equals id order because ids_ is sorted.
std::vector<std::size_t> nearest_indices(const EmbeddingTable& table,
                                         const std::vector<float>& oracle,
                                         int k) {
  std::vector<double> dist(table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    dist[i] = std::sqrt(squared_distance(table.vector_of(i), oracle));
  std::vector<std::size_t> order(table.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return a < b;
                    });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

}  // namespace

EmbeddingTable::EmbeddingTable(
    std::size_t dim, std::vector<std::pair<ItemId, std::vector<float>>> vectors)
    : dim_(dim) {
  if (dim_ == 0) throw ValidationError("embedding dim must be >= 1");
  std::sort(vectors.begin(), vectors.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ids_.reserve(vectors.size());
  data_.reserve(vectors.size() * dim_);
  for (auto& [id, vec] : vectors) {
    if (vec.size() != dim_)
      throw ValidationError("item " + id + " has dim " +
                            std::to_string(vec.size()) + ", table has dim " +
                            std::to_string(dim_));
    for (const float v : vec)
      if (!std::isfinite(v))
        throw ValidationError("item " + id + " has a non-finite component");
    if (!ids_.empty() && ids_.back() == id)
      throw ValidationError("duplicate embedding for item " + id);
    ids_.push_back(id);
    data_.insert(data_.end(), vec.begin(), vec.end());
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
}

std::size_t EmbeddingTable::index_of(const ItemId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? ids_.size() : it->second;
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, const float*>> records;
  records.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i)
    records.emplace_back(ids_[i], data_.data() + i * dim_);
  write_records(path, dim_, records);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  auto records = read_records(path);
  if (records.empty())
    throw ValidationError("embedding file holds no records: " + path.string());
  const std::size_t dim = records.front().second.size();
  return EmbeddingTable(dim, std::move(records));
}

std::map<ItemId, double> distances(const EmbeddingTable& table,
                                   const OracleEmbedding& oracle) {
  check_dims(table, oracle);
  std::map<ItemId, double> out;
  for (std::size_t i = 0; i < table.size(); ++i)
    out.emplace(table.ids()[i],
                std::sqrt(squared_distance(table.vector_of(i), oracle.vector)));
  return out;
}

Slate ground(const EmbeddingTable& table, const OracleEmbedding& oracle, int k) {
  check_dims(table, oracle);
  if (k < 1 || static_cast<std::size_t>(k) > table.size())
    throw ValidationError("ground requires 1 <= k <= " +
                          std::to_string(table.size()) + ", got " +
                          std::to_string(k));
  Slate slate;
  slate.sequence_ref = oracle.sequence_ref;
  for (const std::size_t i : nearest_indices(table, oracle.vector, k))
    slate.ranked_items.push_back(table.ids()[i]);
  return slate;
}

std::vector<Slate> ground_batch(const EmbeddingTable& table,
                                const std::vector<OracleEmbedding>& oracles,
                                int k) {
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    try {
      check_dims(table, oracles[i]);
    } catch (const ValidationError& e) {
      throw ValidationError("oracle #" + std::to_string(i) + ": " + e.what());
    }
  }
  if (k < 1 || static_cast<std::size_t>(k) > table.size())
    throw ValidationError("ground requires 1 <= k <= " +
                          std::to_string(table.size()) + ", got " +
                          std::to_string(k));
  std::vector<Slate> slates(oracles.size());
  parallel_for(oracles.size(), [&](std::size_t i) {
    slates[i].sequence_ref = oracles[i].sequence_ref;
    for (const std::size_t row : nearest_indices(table, oracles[i].vector, k))
      slates[i].ranked_items.push_back(table.ids()[row]);
  });
  return slates;
}

void save_oracles(const std::vector<OracleEmbedding>& oracles, std::size_t dim,
                  const std::filesystem::path& path) {
  std::vector<std::pair<std::string, const float*>> records;
  records.reserve(oracles.size());
  for (const auto& oracle : oracles) {
    if (oracle.vector.size() != dim)
      throw ValidationError("oracle '" + oracle.sequence_ref + "' has dim " +
                            std::to_string(oracle.vector.size()) + ", want " +
                            std::to_string(dim));
    records.emplace_back(oracle.sequence_ref, oracle.vector.data());
  }
  write_records(path, dim, records);
}

std::vector<OracleEmbedding> load_oracles(const std::filesystem::path& path) {
  auto records = read_records(path);
  std::vector<OracleEmbedding> oracles;
  oracles.reserve(records.size());
  for (auto& [id, vec] : records) {
    if (!oracles.empty() && vec.size() != oracles.front().vector.size())
      throw ValidationError("oracle file mixes dimensions: " + path.string());
    oracles.push_back({std::move(id), std::move(vec)});
  }
  return oracles;
}

}  // namespace ifair
