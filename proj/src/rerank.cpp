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

#include "ifair/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ifair/parallel.hpp"
#include "json.hpp"

namespace ifair {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double clamp_punishment(double u, double epsilon) {
  return std::min(u, 1.0 - epsilon);
}

nlohmann::ordered_json map_to_json(const std::map<std::string, double>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<std::string, double> map_from_json(const nlohmann::json& j) {
  std::map<std::string, double> m;
  for (const auto& [k, v] : j.items()) m[k] = v.get<double>();
  return m;
}

}  // namespace

void RerankConfig::validate() const {
  if (k_set.empty()) throw ValidationError("k_set must be nonempty");
  for (std::size_t i = 0; i < k_set.size(); ++i) {
    if (k_set[i] < 1) throw ValidationError("k_set values must be >= 1");
    if (i > 0 && k_set[i] <= k_set[i - 1])
      throw ValidationError("k_set must be strictly increasing");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ValidationError("alpha must be finite and >= 0");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw ValidationError("epsilon must lie in (0, 1)");
}

std::map<int, double> RerankConfig::gammas() const {
  validate();
  long long sum = 0;
  for (const int k : k_set) sum += k;
  std::map<int, double> out;
  for (const int k : k_set)
    out[k] = static_cast<double>(k) / static_cast<double>(sum);
  return out;
}

std::map<GroupLabel, double> punishment_raw(
    const std::map<int, std::map<GroupLabel, double>>& validation_gu_at_k,
    const RerankConfig& config) {
  const auto gamma = config.gammas();
  std::map<GroupLabel, double> raw;
  bool first = true;
  for (const int k : config.k_set) {
    auto it = validation_gu_at_k.find(k);
    if (it == validation_gu_at_k.end())
      throw ValidationError("missing GU values for K=" + std::to_string(k));
    if (first) {
      for (const auto& [group, value] : it->second) raw[group] = 0.0;
      first = false;
    } else if (it->second.size() != raw.size()) {
      throw ValidationError("GU maps disagree on the group set across K");
    }
    for (const auto& [group, value] : it->second) {
      auto slot = raw.find(group);
      if (slot == raw.end())
        throw ValidationError("GU maps disagree on the group set across K");
      slot->second += gamma.at(k) * value;
    }
  }
  return raw;
}

std::map<GroupLabel, double> punishment_normalize(
    const std::map<GroupLabel, double>& raw) {
  if (raw.empty()) throw ValidationError("cannot normalize an empty punishment map");
  double max_abs = 0.0;
  for (const auto& [group, value] : raw)
    max_abs = std::max(max_abs, std::fabs(value));
  std::map<GroupLabel, double> out;
  for (const auto& [group, value] : raw)
    out[group] = max_abs == 0.0 ? 0.0 : value / max_abs;
  return out;
}

std::map<ItemId, double> punishment_items(
    const std::map<GroupLabel, double>& normalized, const GroupScheme& scheme) {
  std::map<ItemId, double> out;
  for (const auto& [item, groups] : scheme.membership_map()) {
    if (groups.empty()) continue;  // absent means zero punishment
    double sum = 0.0;
    for (const auto& group : groups) {
      auto it = normalized.find(group);
      if (it == normalized.end())
        throw ValidationError("no normalized punishment for group " + group);
      sum += it->second;
    }
    out[item] = sum / static_cast<double>(groups.size());
  }
  return out;
}

PunishmentTable build_punishment_table(
    const std::map<int, std::map<GroupLabel, double>>& validation_gu_at_k,
    const GroupScheme& scheme, const RerankConfig& config) {
  PunishmentTable table;
  table.raw = punishment_raw(validation_gu_at_k, config);
  table.normalized = punishment_normalize(table.raw);
  table.per_item = punishment_items(table.normalized, scheme);
  table.k_set = config.k_set;
  return table;
}

std::string PunishmentTable::to_json() const {
  nlohmann::ordered_json j;
  j["raw"] = map_to_json(raw);
  j["normalized"] = map_to_json(normalized);
  j["per_item"] = map_to_json(per_item);
  j["k_set"] = k_set;
  j["source"] = source;
  return j.dump(2);
}

PunishmentTable PunishmentTable::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("punishment JSON parse failure: ") + e.what());
  }
  PunishmentTable table;
  table.raw = map_from_json(j.at("raw"));
  table.normalized = map_from_json(j.at("normalized"));
  table.per_item = map_from_json(j.at("per_item"));
  table.k_set = j.at("k_set").get<std::vector<int>>();
  table.source = j.value("source", std::string("validation"));
  return table;
}

void PunishmentTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write punishment file: " + path.string());
  out << to_json() << '\n';
}

PunishmentTable PunishmentTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("punishment file not found: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

Slate rerank(const std::map<ItemId, double>& item_distances,
             const PunishmentTable& table, const RerankConfig& config, int k,
             SequenceRef sequence_ref) {
  config.validate();
  if (k < 1) throw ValidationError("rerank requires k >= 1");
  std::vector<std::pair<double, const ItemId*>> adjusted;
  adjusted.reserve(item_distances.size());
  for (const auto& [item, distance] : item_distances) {
    auto it = table.per_item.find(item);
    const double u = it == table.per_item.end() ? 0.0 : it->second;
    const double factor =
        std::pow(1.0 - clamp_punishment(u, config.epsilon), -config.alpha);
    adjusted.emplace_back(distance * factor, &item);
  }
  const std::size_t take =
      std::min(adjusted.size(), static_cast<std::size_t>(k));
  std::partial_sort(adjusted.begin(), adjusted.begin() + take, adjusted.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return *a.second < *b.second;
                    });
  Slate slate;
  slate.sequence_ref = std::move(sequence_ref);
  for (std::size_t i = 0; i < take; ++i)
    slate.ranked_items.push_back(*adjusted[i].second);
  return slate;
}

namespace {

// Punishment factor per table row, (1 - min(U_i, 1-eps))^(-alpha). At alpha 0
// pow returns exactly 1, so reranking degenerates to plain grounding bitwise.
std::vector<double> row_factors(const EmbeddingTable& table,
                                const PunishmentTable& punishment,
                                const RerankConfig& config, double alpha) {
  std::vector<double> factors(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto it = punishment.per_item.find(table.ids()[i]);
    const double u = it == punishment.per_item.end() ? 0.0 : it->second;
    factors[i] = std::pow(1.0 - clamp_punishment(u, config.epsilon), -alpha);
  }
  return factors;
}

void check_oracle_dims(const EmbeddingTable& table,
                       const std::vector<OracleEmbedding>& oracles) {
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    if (oracles[i].vector.size() != table.dim())
      throw ValidationError("oracle #" + std::to_string(i) + " ('" +
                            oracles[i].sequence_ref + "') has dim " +
                            std::to_string(oracles[i].vector.size()) +
                            ", table has dim " + std::to_string(table.dim()));
  }
}

void distance_row(const EmbeddingTable& table, const std::vector<float>& oracle,
                  std::vector<double>& out) {
  out.resize(table.size());
  const std::size_t dim = table.dim();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto row = table.vector_of(i);
    double sum = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff =
          static_cast<double>(row[d]) - static_cast<double>(oracle[d]);
      sum += diff * diff;
    }
    out[i] = std::sqrt(sum);
  }
}

// Top-take indices of adjusted[i] = base[i] * factors[i], ties by index
// (equals id order since table ids are sorted).
void select_top(const std::vector<double>& base,
                const std::vector<double>& factors, std::size_t take,
                std::vector<std::uint32_t>& scratch_order,
                std::vector<double>& scratch_adjusted,
                std::uint32_t* out) {
  const std::size_t n = base.size();
  scratch_adjusted.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch_adjusted[i] = base[i] * factors[i];
  scratch_order.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    scratch_order[i] = static_cast<std::uint32_t>(i);
  std::partial_sort(scratch_order.begin(), scratch_order.begin() + take,
                    scratch_order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (scratch_adjusted[a] != scratch_adjusted[b])
                        return scratch_adjusted[a] < scratch_adjusted[b];
                      return a < b;
                    });
  std::copy(scratch_order.begin(), scratch_order.begin() + take, out);
}

}  // namespace

std::vector<Slate> rerank_batch(const EmbeddingTable& table,
                                const std::vector<OracleEmbedding>& oracles,
                                const PunishmentTable& punishment,
                                const RerankConfig& config, int k) {
  config.validate();
  check_oracle_dims(table, oracles);
  if (k < 1 || static_cast<std::size_t>(k) > table.size())
    throw ValidationError("rerank requires 1 <= k <= " +
                          std::to_string(table.size()) + ", got " +
                          std::to_string(k));
  const auto factors = row_factors(table, punishment, config, config.alpha);
  const std::size_t take = static_cast<std::size_t>(k);
  std::vector<Slate> slates(oracles.size());
  parallel_for(oracles.size(), [&](std::size_t i) {
    std::vector<double> base;
    std::vector<double> adjusted;
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> top(take);
    distance_row(table, oracles[i].vector, base);
    select_top(base, factors, take, order, adjusted, top.data());
    slates[i].sequence_ref = oracles[i].sequence_ref;
    slates[i].ranked_items.reserve(take);
    for (const std::uint32_t row : top)
      slates[i].ranked_items.push_back(table.ids()[row]);
  });
  return slates;
}

namespace {

// Integer membership counting over index slates; divisions mirror the metric
// module exactly so sweep reports match the public path bit for bit.
struct IndexCounting {
  std::vector<std::vector<std::uint32_t>> item_groups;  // table row -> group rows
  std::vector<GroupLabel> labels;

  IndexCounting(const EmbeddingTable& table, const GroupScheme& scheme)
      : item_groups(table.size()), labels(scheme.groups()) {
    std::map<GroupLabel, std::uint32_t> group_index;
    for (std::uint32_t g = 0; g < labels.size(); ++g) group_index[labels[g]] = g;
    for (std::size_t i = 0; i < table.size(); ++i)
      for (const auto& label : scheme.groups_of(table.ids()[i]))
        item_groups[i].push_back(group_index.at(label));
  }

  std::map<GroupLabel, double> proportions(const std::uint32_t* slates,
                                           std::size_t n_slates,
                                           std::size_t slate_len,
                                           std::size_t prefix) const {
    std::vector<std::size_t> counts(labels.size(), 0);
    std::size_t total = 0;
    const std::size_t take = std::min(prefix, slate_len);
    for (std::size_t s = 0; s < n_slates; ++s) {
      const std::uint32_t* slate = slates + s * slate_len;
      for (std::size_t j = 0; j < take; ++j) {
        for (const std::uint32_t g : item_groups[slate[j]]) {
          ++counts[g];
          ++total;
        }
      }
    }
    if (total == 0)
      throw ValidationError("no grouped recommendations in the sweep slates");
    std::map<GroupLabel, double> out;
    for (std::size_t g = 0; g < labels.size(); ++g)
      out[labels[g]] =
          static_cast<double>(counts[g]) / static_cast<double>(total);
    return out;
  }
};

Accuracy accuracy_from_indices(const std::uint32_t* slates, std::size_t n_slates,
                               std::size_t slate_len, std::size_t prefix,
                               const std::vector<std::size_t>& target_rows,
                               std::size_t missing_row) {
  double ndcg_sum = 0.0;
  std::size_t hits = 0;
  const std::size_t take = std::min(prefix, slate_len);
  for (std::size_t s = 0; s < n_slates; ++s) {
    const std::size_t target = target_rows[s];
    if (target == missing_row) continue;
    const std::uint32_t* slate = slates + s * slate_len;
    for (std::size_t r = 0; r < take; ++r) {
      if (slate[r] == target) {
        ++hits;
        ndcg_sum += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        break;
      }
    }
  }
  const double n = static_cast<double>(n_slates);
  return {ndcg_sum / n, static_cast<double>(hits) / n};
}

}  // namespace

SweepResult sweep_alpha(const SweepInputs& inputs,
                        const std::vector<double>& alphas) {
  inputs.config.validate();
  if (alphas.empty()) throw ValidationError("sweep needs at least one alpha");
  for (const double alpha : alphas)
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw ValidationError("sweep alphas must be finite and >= 0");
  if (inputs.oracles.size() != inputs.histories.size() ||
      inputs.oracles.size() != inputs.targets.size())
    throw ValidationError("sweep inputs are not aligned");
  if (inputs.oracles.empty())
    throw ValidationError("sweep needs at least one validation oracle");
  check_oracle_dims(inputs.table, inputs.oracles);

  const EmbeddingTable& table = inputs.table;
  const auto& ks = inputs.config.k_set;
  const std::size_t n = inputs.oracles.size();
  const std::size_t slate_len = std::min(
      static_cast<std::size_t>(std::max(ks.back(), 5)), table.size());

  const IndexCounting counting(table, inputs.scheme);
  const auto gh_map = gh(inputs.histories, inputs.scheme);

  std::vector<std::size_t> target_rows(n);
  for (std::size_t i = 0; i < n; ++i)
    target_rows[i] = table.index_of(inputs.targets[i]);

  // Pass 1: uncalibrated slates feed the punishment table and the accuracy
  // baseline. Only validation data enters here; test slates never do.
  std::vector<std::uint32_t> base_slates(n * slate_len);
  {
    const std::vector<double> ones(table.size(), 1.0);
    parallel_for(n, [&](std::size_t i) {
      std::vector<double> base;
      std::vector<double> adjusted;
      std::vector<std::uint32_t> order;
      distance_row(table, inputs.oracles[i].vector, base);
      select_top(base, ones, slate_len, order, adjusted,
                 base_slates.data() + i * slate_len);
    });
  }

  std::map<int, std::map<GroupLabel, double>> gu_at_k;
  for (const int k : ks) {
    const auto gp_map = counting.proportions(
        base_slates.data(), n, slate_len, static_cast<std::size_t>(k));
    gu_at_k[k] = group_unfairness(gh_map, gp_map);
  }

  SweepResult result;
  result.punishment = build_punishment_table(gu_at_k, inputs.scheme, inputs.config);
  result.baseline_ndcg5 =
      accuracy_from_indices(base_slates.data(), n, slate_len, 5, target_rows,
                            table.size())
          .ndcg;

  // Pass 2: one distance evaluation per oracle serves every alpha.
  std::vector<std::vector<double>> factors;
  factors.reserve(alphas.size());
  for (const double alpha : alphas)
    factors.push_back(row_factors(table, result.punishment, inputs.config, alpha));

  std::vector<std::vector<std::uint32_t>> slates(
      alphas.size(), std::vector<std::uint32_t>(n * slate_len));
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> base;
    std::vector<double> adjusted;
    std::vector<std::uint32_t> order;
    distance_row(table, inputs.oracles[i].vector, base);
    for (std::size_t a = 0; a < alphas.size(); ++a)
      select_top(base, factors[a], slate_len, order, adjusted,
                 slates[a].data() + i * slate_len);
  });

  result.points.reserve(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    SweepPoint point;
    point.alpha = alphas[a];
    for (const int k : ks) {
      FairnessReport report;
      report.scheme = inputs.scheme.name();
      report.k = k;
      report.gh = gh_map;
      report.gp = counting.proportions(slates[a].data(), n, slate_len,
                                       static_cast<std::size_t>(k));
      report.gu = group_unfairness(report.gh, report.gp);
      report.mgu = mgu(report.gu);
      report.dgu = dgu(report.gu);
      const Accuracy acc =
          accuracy_from_indices(slates[a].data(), n, slate_len,
                                static_cast<std::size_t>(k), target_rows,
                                table.size());
      report.ndcg = acc.ndcg;
      report.hr = acc.hr;
      report.short_slate_warnings =
          static_cast<std::size_t>(k) > slate_len ? n : 0;
      point.reports.push_back(std::move(report));
    }
    const Accuracy acc5 = accuracy_from_indices(
        slates[a].data(), n, slate_len, 5, target_rows, table.size());
    point.ndcg5 = acc5.ndcg;
    point.hr5 = acc5.hr;
    result.points.push_back(std::move(point));
  }

  // Selection: smallest MGU at the largest K among alphas whose NDCG@5 kept
  // within 5% relative of the uncalibrated run; highest NDCG wins when no
  // alpha qualifies.
  const double floor = 0.95 * result.baseline_ndcg5;
  std::size_t best = alphas.size();
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    if (result.points[a].ndcg5 < floor) continue;
    if (best == alphas.size() ||
        result.points[a].reports.back().mgu <
            result.points[best].reports.back().mgu)
      best = a;
  }
  if (best == alphas.size()) {
    best = 0;
    for (std::size_t a = 1; a < alphas.size(); ++a)
      if (result.points[a].ndcg5 > result.points[best].ndcg5) best = a;
  }
  result.selected_index = best;
  result.selected_alpha = alphas[best];
  return result;
}

void write_sweep_csv(const SweepResult& result,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write sweep CSV: " + path.string());
  out << "alpha";
  if (!result.points.empty()) {
    for (const auto& report : result.points.front().reports)
      out << ",mgu@" << report.k;
    for (const auto& report : result.points.front().reports)
      out << ",dgu@" << report.k;
  }
  out << ",ndcg@5,hr@5,selected\n";
  for (std::size_t a = 0; a < result.points.size(); ++a) {
    const auto& point = result.points[a];
    out << format_double(point.alpha);
    for (const auto& report : point.reports) out << ',' << format_double(report.mgu);
    for (const auto& report : point.reports) out << ',' << format_double(report.dgu);
    out << ',' << format_double(point.ndcg5) << ',' << format_double(point.hr5)
        << ',' << (a == result.selected_index ? 1 : 0) << '\n';
  }
}

}  // namespace ifair
