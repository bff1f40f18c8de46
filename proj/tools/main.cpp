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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ifair/dataset.hpp"
#include "ifair/grounding.hpp"
#include "ifair/grouping.hpp"
#include "ifair/manifest.hpp"
#include "ifair/metrics.hpp"
#include "ifair/rerank.hpp"
#include "ifair/reweight.hpp"
#include "ifair/simulator.hpp"
#include "ifair/types.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ifair;

namespace {

// Exit-code contract: 0 success, 2 missing input, 3 validation failure,
// 4 internal invariant breach.
constexpr int kExitMissingInput = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInternal = 4;

struct GlobalOpts {
  std::uint64_t seed = 0;
  fs::path out_dir = "out";
  std::string scheme = "popularity";
  std::vector<int> k_list = {1, 5, 10, 20};   // reporting Ks
  std::vector<int> k_set = {1, 5, 10, 20};    // punishment aggregation Ks
  double alpha = 0.0;
};

// Config files: TOML through the stock parser, JSON when the file starts
// with a brace.
class AutoConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    return CLI::ConfigTOML().to_config(app, default_also, false, "");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buffer;
    buffer << input.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw CLI::FileError(std::string("bad JSON config: ") + e.what());
      }
      std::vector<CLI::ConfigItem> items;
      for (const auto& [key, value] : j.items()) {
        CLI::ConfigItem item;
        item.name = key;
        if (value.is_array())
          for (const auto& element : value)
            item.inputs.push_back(element.is_string()
                                      ? element.get<std::string>()
                                      : element.dump());
        else
          item.inputs.push_back(value.is_string() ? value.get<std::string>()
                                                  : value.dump());
        items.push_back(std::move(item));
      }
      return items;
    }
    std::stringstream replay(text);
    return CLI::ConfigTOML().from_config(replay);
  }
};

// Stage inputs may be bare artifact names (resolved inside --out-dir) or
// explicit paths.
fs::path resolve_input(const GlobalOpts& g, const std::string& name) {
  const fs::path direct(name);
  if (direct.is_absolute() || fs::exists(direct)) return direct;
  return g.out_dir / direct;
}

void require_inputs(const GlobalOpts& g, const std::vector<fs::path>& paths) {
  for (const auto& path : paths)
    if (!fs::exists(path))
      throw MissingInputError("required input missing: " + path.string());
  verify_against_manifests(g.out_dir, paths);
}

void write_manifest(const GlobalOpts& g, const std::string& stage,
                    const std::vector<fs::path>& inputs,
                    const std::vector<fs::path>& outputs,
                    std::map<std::string, std::string> params) {
  Manifest manifest;
  manifest.stage = stage;
  manifest.seed = g.seed;
  manifest.params = std::move(params);
  for (const auto& path : inputs)
    manifest.inputs[fs::weakly_canonical(path).string()] = hash_file(path);
  for (const auto& path : outputs)
    manifest.outputs[fs::weakly_canonical(path).string()] = hash_file(path);
  manifest.save(g.out_dir / (stage + ".manifest.json"));
}

GroupScheme load_scheme_artifact(const GlobalOpts& g) {
  return GroupScheme::load(resolve_input(g, "scheme.json"));
}

void write_items_tsv(const InteractionLog& log, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "item_id\ttitle\tgenres\n";
  for (const auto& [id, info] : log.items) {
    out << id << '\t' << info.title << '\t';
    for (std::size_t i = 0; i < info.genres.size(); ++i)
      out << (i ? "|" : "") << info.genres[i];
    out << '\n';
  }
}

void write_interactions_tsv(const InteractionLog& log, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "user_id\titem_id\ttimestamp\n";
  for (const auto& e : log.events)
    out << e.user << '\t' << e.item << '\t' << e.timestamp << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Envelope around the per-K report objects, one file per evaluated method.
void write_evaluation_json(const std::string& label,
                           const std::vector<FairnessReport>& reports,
                           double ndcg5, double hr5, const fs::path& path) {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["ndcg5"] = ndcg5;
  j["hr5"] = hr5;
  nlohmann::ordered_json short_counts = nlohmann::ordered_json::object();
  for (const auto& report : reports)
    short_counts[std::to_string(report.k)] = report.short_slate_warnings;
  j["short_slate_warnings"] = std::move(short_counts);
  j["reports"] = nlohmann::json::array();
  for (const auto& report : reports)
    j["reports"].push_back(nlohmann::ordered_json::parse(report_to_json(report)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct Evaluation {
  std::string label;
  double ndcg5 = 0.0;
  double hr5 = 0.0;
  std::vector<FairnessReport> reports;
};

Evaluation read_evaluation_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("evaluation file not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": bad evaluation JSON: " + e.what());
  }
  Evaluation eval;
  eval.label = j.at("label").get<std::string>();
  eval.ndcg5 = j.at("ndcg5").get<double>();
  eval.hr5 = j.at("hr5").get<double>();
  for (const auto& entry : j.at("reports"))
    eval.reports.push_back(report_from_json(entry.dump()));
  return eval;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  SimConfig config;
};

void cmd_simulate(const GlobalOpts& g, const SimulateArgs& args) {
  fs::create_directories(g.out_dir);
  SimConfig config = args.config;
  config.seed = g.seed;
  config.validate();

  const auto log = generate_log(config);
  const auto split = split_periods(log);
  const auto sequences = build_sequences(split);
  const auto table = generate_embeddings(log, config);

  std::vector<Sequence> eval_sequences;
  for (const auto& seq : sequences)
    if (seq.split != SplitPart::train) eval_sequences.push_back(seq);
  const auto oracles = generate_oracles(eval_sequences, table, config);

  std::vector<OracleEmbedding> validation, test;
  for (std::size_t i = 0; i < eval_sequences.size(); ++i) {
    (eval_sequences[i].split == SplitPart::validation ? validation : test)
        .push_back(oracles[i]);
  }

  const auto interactions = g.out_dir / "interactions.tsv";
  const auto items = g.out_dir / "items.tsv";
  const auto seq_path = g.out_dir / "sequences.jsonl";
  const auto emb_path = g.out_dir / "embeddings.bin";
  const auto val_path = g.out_dir / "oracles_validation.bin";
  const auto test_path = g.out_dir / "oracles_test.bin";
  write_interactions_tsv(log, interactions);
  write_items_tsv(log, items);
  write_sequences_jsonl(sequences, seq_path);
  table.save(emb_path);
  save_oracles(validation, table.dim(), val_path);
  save_oracles(test, table.dim(), test_path);

  write_manifest(g, "simulate", {},
                 {interactions, items, seq_path, emb_path, val_path, test_path},
                 {{"n_items", std::to_string(config.n_items)},
                  {"n_users", std::to_string(config.n_users)},
                  {"n_events", std::to_string(config.n_events)},
                  {"n_genres", std::to_string(config.n_genres)},
                  {"embed_dim", std::to_string(config.embed_dim)},
                  {"popularity_exponent", fmt(config.popularity_exponent)},
                  {"oracle_bias", fmt(config.oracle_bias)},
                  {"noise_sigma", fmt(config.noise_sigma)}});
  std::cout << "simulate: " << log.events.size() << " events, "
            << log.items.size() << " items, " << sequences.size()
            << " sequences, " << validation.size() << "+" << test.size()
            << " eval oracles -> " << g.out_dir.string() << "\n";
}

// ------------------------------------------------------------------ ingest

void cmd_ingest(const GlobalOpts& g, const std::string& interactions,
                const std::string& items, std::size_t min_genre_interactions) {
  const auto interactions_in = fs::path(interactions);
  const auto items_in = fs::path(items);
  if (!fs::exists(interactions_in))
    throw MissingInputError("interactions file not found: " + interactions);
  if (!fs::exists(items_in))
    throw MissingInputError("items file not found: " + items);

  auto log = ingest(interactions_in, items_in);
  const std::size_t raw_items = log.items.size();
  const std::size_t raw_events = log.events.size();
  if (min_genre_interactions > 0)
    log = filter_rare_genres(log, min_genre_interactions);

  fs::create_directories(g.out_dir);
  const auto interactions_out = g.out_dir / "interactions.tsv";
  const auto items_out = g.out_dir / "items.tsv";
  write_interactions_tsv(log, interactions_out);
  write_items_tsv(log, items_out);
  write_manifest(g, "ingest", {interactions_in, items_in},
                 {interactions_out, items_out},
                 {{"raw_items", std::to_string(raw_items)},
                  {"raw_events", std::to_string(raw_events)},
                  {"items", std::to_string(log.items.size())},
                  {"events", std::to_string(log.events.size())},
                  {"min_genre_interactions",
                   std::to_string(min_genre_interactions)}});
  std::cout << "ingest: " << log.items.size() << " items, "
            << log.events.size() << " events\n";
}

// ------------------------------------------------------------------- split

void cmd_split(const GlobalOpts& g, int max_len) {
  const auto interactions = resolve_input(g, "interactions.tsv");
  const auto items = resolve_input(g, "items.tsv");
  require_inputs(g, {interactions, items});
  const auto log = ingest(interactions, items);
  const auto split = split_periods(log);
  const auto sequences = build_sequences(split, max_len);
  const auto seq_path = g.out_dir / "sequences.jsonl";
  write_sequences_jsonl(sequences, seq_path);

  std::size_t train = 0, validation = 0, test = 0;
  for (const auto& seq : sequences) {
    train += seq.split == SplitPart::train;
    validation += seq.split == SplitPart::validation;
    test += seq.split == SplitPart::test;
  }
  write_manifest(g, "split", {interactions, items}, {seq_path},
                 {{"max_len", std::to_string(max_len)},
                  {"train", std::to_string(train)},
                  {"validation", std::to_string(validation)},
                  {"test", std::to_string(test)}});
  std::cout << "split: " << train << " train / " << validation
            << " validation / " << test << " test sequences\n";
}

// ------------------------------------------------------------------- group

void cmd_group(const GlobalOpts& g, int n_groups, bool all_events) {
  const auto interactions = resolve_input(g, "interactions.tsv");
  const auto items = resolve_input(g, "items.tsv");
  require_inputs(g, {interactions, items});
  const auto log = ingest(interactions, items);

  std::vector<fs::path> extra_inputs;
  GroupScheme scheme = [&]() -> GroupScheme {
    if (g.scheme == "popularity")
      return popularity_scheme(
          log, {.train_events_only = !all_events, .n_groups = n_groups});
    if (g.scheme == "genre") return genre_scheme(log);
    const fs::path custom = resolve_input(g, g.scheme);
    if (!fs::exists(custom))
      throw MissingInputError("custom scheme file not found: " + custom.string());
    extra_inputs.push_back(custom);
    return GroupScheme::load(custom);
  }();

  const auto scheme_path = g.out_dir / "scheme.json";
  scheme.save(scheme_path);
  std::vector<fs::path> inputs = {interactions, items};
  inputs.insert(inputs.end(), extra_inputs.begin(), extra_inputs.end());
  write_manifest(g, "group", inputs, {scheme_path},
                 {{"scheme", scheme.name()},
                  {"groups", std::to_string(scheme.groups().size())}});
  std::cout << "group: scheme '" << scheme.name() << "' with "
            << scheme.groups().size() << " groups\n";
}

// ------------------------------------------------------------------ ground

void cmd_ground(const GlobalOpts& g, const std::string& oracles_name,
                const std::string& slates_name) {
  const auto emb_path = resolve_input(g, "embeddings.bin");
  const auto oracles_path = resolve_input(g, oracles_name);
  require_inputs(g, {emb_path, oracles_path});
  const auto table = EmbeddingTable::load(emb_path);
  const auto oracles = load_oracles(oracles_path);
  const int k = *std::max_element(g.k_list.begin(), g.k_list.end());
  const auto slates = ground_batch(table, oracles, k);
  const auto slates_path = g.out_dir / slates_name;
  write_slates_jsonl(slates, slates_path);
  write_manifest(g, "ground", {emb_path, oracles_path}, {slates_path},
                 {{"k", std::to_string(k)},
                  {"oracles", std::to_string(oracles.size())}});
  std::cout << "ground: " << slates.size() << " slates at k=" << k << "\n";
}

// ---------------------------------------------------------------- evaluate

void cmd_evaluate(const GlobalOpts& g, const std::string& slates_name,
                  const std::string& label) {
  const auto slates_path = resolve_input(g, slates_name);
  const auto seq_path = resolve_input(g, "sequences.jsonl");
  const auto scheme_path = resolve_input(g, "scheme.json");
  require_inputs(g, {slates_path, seq_path, scheme_path});
  const auto slates = read_slates_jsonl(slates_path);
  const auto sequences = read_sequences_jsonl(seq_path);
  const auto scheme = GroupScheme::load(scheme_path);

  std::vector<std::vector<ItemId>> histories;
  std::vector<ItemId> targets;
  histories.reserve(slates.size());
  targets.reserve(slates.size());
  for (const auto& slate : slates) {
    std::size_t index = 0;
    try {
      index = std::stoul(slate.sequence_ref);
    } catch (const std::exception&) {
      throw ValidationError("slate ref '" + slate.sequence_ref +
                            "' is not a sequence index");
    }
    if (index >= sequences.size())
      throw ValidationError("slate ref " + slate.sequence_ref +
                            " exceeds the sequence count " +
                            std::to_string(sequences.size()));
    histories.push_back(sequences[index].history);
    targets.push_back(sequences[index].target);
  }

  std::vector<FairnessReport> reports;
  for (const int k : g.k_list)
    reports.push_back(evaluate(histories, slates, targets, scheme, k));
  const Accuracy at5 = accuracy(slates, targets, 5);

  const auto json_path = g.out_dir / ("eval_" + label + ".json");
  const auto csv_path = g.out_dir / ("eval_" + label + ".csv");
  write_evaluation_json(label, reports, at5.ndcg, at5.hr, json_path);
  write_report_csv(reports, csv_path);
  write_manifest(g, "evaluate_" + label, {slates_path, seq_path, scheme_path},
                 {json_path, csv_path},
                 {{"label", label}, {"slates", std::to_string(slates.size())}});
  std::cout << "evaluate[" << label << "]:";
  for (const auto& report : reports)
    std::cout << " mgu@" << report.k << "=" << fmt(report.mgu);
  std::cout << " ndcg@5=" << fmt(at5.ndcg) << " hr@5=" << fmt(at5.hr) << "\n";
}

// ---------------------------------------------------------------- reweight

void cmd_reweight(const GlobalOpts& g, std::size_t sample_size) {
  const auto seq_path = resolve_input(g, "sequences.jsonl");
  const auto scheme_path = resolve_input(g, "scheme.json");
  require_inputs(g, {seq_path, scheme_path});
  const auto sequences = read_sequences_jsonl(seq_path);
  const auto scheme = GroupScheme::load(scheme_path);

  std::vector<Sequence> train;
  for (const auto& seq : sequences)
    if (seq.split == SplitPart::train) train.push_back(seq);
  const auto draw = draw_training_sample(train, sample_size, g.seed);
  const auto table = build_weight_table(draw.sequences, scheme);

  const auto weights_path = g.out_dir / "weights.tsv";
  write_weights_tsv(table, g.seed, weights_path);
  write_manifest(g, "reweight", {seq_path, scheme_path}, {weights_path},
                 {{"sample_size", std::to_string(sample_size)},
                  {"drawn", std::to_string(draw.sequences.size())},
                  {"warnings", std::to_string(table.warnings.size())}});
  std::cout << "reweight: " << draw.sequences.size() << " samples, "
            << table.group_weights.size() << " group weights";
  for (const auto& [group, w] : table.group_weights)
    std::cout << " W[" << group << "]=" << fmt(w);
  std::cout << "\n";
}

// ------------------------------------------------------------------ rerank

void cmd_rerank(const GlobalOpts& g, const std::string& oracles_name,
                const std::string& slates_name) {
  const auto emb_path = resolve_input(g, "embeddings.bin");
  const auto oracles_path = resolve_input(g, oracles_name);
  const auto punishment_path = resolve_input(g, "punishment.json");
  require_inputs(g, {emb_path, oracles_path, punishment_path});
  const auto table = EmbeddingTable::load(emb_path);
  const auto oracles = load_oracles(oracles_path);
  const auto punishment = PunishmentTable::load(punishment_path);

  RerankConfig config;
  config.k_set = g.k_set;
  config.alpha = g.alpha;
  const int k = *std::max_element(g.k_list.begin(), g.k_list.end());
  const auto slates = rerank_batch(table, oracles, punishment, config, k);
  const auto slates_path = g.out_dir / slates_name;
  write_slates_jsonl(slates, slates_path);
  write_manifest(g, "rerank", {emb_path, oracles_path, punishment_path},
                 {slates_path},
                 {{"alpha", fmt(config.alpha)}, {"k", std::to_string(k)}});
  std::cout << "rerank: " << slates.size() << " slates at alpha="
            << fmt(config.alpha) << "\n";
}

// ------------------------------------------------------------------- sweep

void cmd_sweep(const GlobalOpts& g, const std::string& oracles_name,
               std::vector<double> alphas) {
  const auto emb_path = resolve_input(g, "embeddings.bin");
  const auto oracles_path = resolve_input(g, oracles_name);
  const auto seq_path = resolve_input(g, "sequences.jsonl");
  const auto scheme_path = resolve_input(g, "scheme.json");
  require_inputs(g, {emb_path, oracles_path, seq_path, scheme_path});
  const auto table = EmbeddingTable::load(emb_path);
  const auto oracles = load_oracles(oracles_path);
  const auto sequences = read_sequences_jsonl(seq_path);
  const auto scheme = GroupScheme::load(scheme_path);

  std::vector<std::vector<ItemId>> histories;
  std::vector<ItemId> targets;
  for (const auto& oracle : oracles) {
    std::size_t index = 0;
    try {
      index = std::stoul(oracle.sequence_ref);
    } catch (const std::exception&) {
      throw ValidationError("oracle ref '" + oracle.sequence_ref +
                            "' is not a sequence index");
    }
    if (index >= sequences.size())
      throw ValidationError("oracle ref " + oracle.sequence_ref +
                            " exceeds the sequence count");
    histories.push_back(sequences[index].history);
    targets.push_back(sequences[index].target);
  }

  if (alphas.empty())
    for (int i = 0; i <= 10; ++i) alphas.push_back(0.01 * i);

  RerankConfig config;
  config.k_set = g.k_set;
  const SweepInputs inputs{table, oracles, histories, targets, scheme, config};
  const auto result = sweep_alpha(inputs, alphas);

  const auto sweep_path = g.out_dir / "sweep.csv";
  const auto punishment_path = g.out_dir / "punishment.json";
  write_sweep_csv(result, sweep_path);
  result.punishment.save(punishment_path);
  write_manifest(g, "sweep", {emb_path, oracles_path, seq_path, scheme_path},
                 {sweep_path, punishment_path},
                 {{"alphas", std::to_string(alphas.size())},
                  {"selected_alpha", fmt(result.selected_alpha)},
                  {"baseline_ndcg5", fmt(result.baseline_ndcg5)}});
  std::cout << "sweep: " << alphas.size() << " alphas, selected alpha="
            << fmt(result.selected_alpha) << " (mgu@" << g.k_set.back() << " "
            << fmt(result.points[result.selected_index].reports.back().mgu)
            << ", baseline "
            << fmt(result.points.front().reports.back().mgu) << ")\n";
}

// ------------------------------------------------------------------ report

void cmd_report(const GlobalOpts& g, const std::vector<std::string>& inputs) {
  if (inputs.empty())
    throw MissingInputError("report needs at least one label=evaluation.json");
  std::vector<Evaluation> evaluations;
  std::vector<fs::path> in_paths;
  for (const auto& spec : inputs) {
    const auto eq = spec.find('=');
    std::string label = eq == std::string::npos ? "" : spec.substr(0, eq);
    const std::string file = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const auto path = resolve_input(g, file);
    if (!fs::exists(path))
      throw MissingInputError("evaluation file not found: " + path.string());
    auto eval = read_evaluation_json(path);
    if (!label.empty()) eval.label = label;
    in_paths.push_back(path);
    evaluations.push_back(std::move(eval));
  }

  const auto report_path = g.out_dir / "report.csv";
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + report_path.string());
    out << "scheme,method";
    for (const auto& report : evaluations.front().reports)
      out << ",mgu@" << report.k;
    for (const auto& report : evaluations.front().reports)
      out << ",dgu@" << report.k;
    out << ",ndcg@5,hr@5\n";
    for (const auto& eval : evaluations) {
      out << eval.reports.front().scheme << ',' << eval.label;
      for (const auto& report : eval.reports) out << ',' << fmt(report.mgu);
      for (const auto& report : eval.reports) out << ',' << fmt(report.dgu);
      out << ',' << fmt(eval.ndcg5) << ',' << fmt(eval.hr5) << '\n';
    }
  }

  std::vector<fs::path> outputs = {report_path};
  for (const auto& eval : evaluations) {
    const auto dist_path = g.out_dir / ("dist_" + eval.label + ".csv");
    std::ofstream out(dist_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + dist_path.string());
    out << "k,group,gh,gp,gu\n";
    for (const auto& report : eval.reports)
      for (const auto& [group, gu_value] : report.gu)
        out << report.k << ',' << group << ',' << fmt(report.gh.at(group))
            << ',' << fmt(report.gp.at(group)) << ',' << fmt(gu_value) << '\n';
    outputs.push_back(dist_path);
  }

  write_manifest(g, "report", in_paths, outputs,
                 {{"methods", std::to_string(evaluations.size())}});
  std::cout << "report: " << evaluations.size() << " methods -> "
            << report_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Item-side fairness evaluation and calibration for "
               "embedding-grounded recommenders"};
  app.set_version_flag("--version", kToolVersion);
  app.config_formatter(std::make_shared<AutoConfig>());
  app.set_config("--config", "", "TOML or JSON config file");
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Seed for all randomized stages")
      ->envname("IFAIR_SEED");
  app.add_option("--out-dir", g.out_dir, "Artifact directory")
      ->envname("IFAIR_OUT_DIR");
  app.add_option("--scheme", g.scheme,
                 "Group scheme: popularity, genre, or a scheme JSON path")
      ->envname("IFAIR_SCHEME");
  app.add_option("--k", g.k_list, "Ks for slates and reports")
      ->envname("IFAIR_K");
  app.add_option("--k-set", g.k_set, "Ks aggregated into the punishment term")
      ->envname("IFAIR_K_SET");
  app.add_option("--alpha", g.alpha, "Punishment exponent for rerank")
      ->envname("IFAIR_ALPHA");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--items", sim.config.n_items, "Catalog size");
  simulate->add_option("--users", sim.config.n_users, "User count");
  simulate->add_option("--events", sim.config.n_events, "Interaction count");
  simulate->add_option("--genres", sim.config.n_genres, "Genre count");
  simulate->add_option("--dim", sim.config.embed_dim, "Embedding dimension");
  simulate->add_option("--pop-exponent", sim.config.popularity_exponent,
                       "Item draw weight rank^(-exponent)");
  simulate->add_option("--bias", sim.config.oracle_bias,
                       "Probability an oracle ignores its target");
  simulate->add_option("--noise", sim.config.noise_sigma,
                       "Embedding noise around genre centroids");

  std::string ingest_interactions, ingest_items;
  std::size_t min_genre_interactions = 0;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and import TSV logs");
  ingest_cmd->add_option("--interactions", ingest_interactions,
                         "interactions TSV path")->required();
  ingest_cmd->add_option("--items", ingest_items, "items TSV path")->required();
  ingest_cmd->add_option("--min-genre-interactions", min_genre_interactions,
                         "Drop items whose genres all fall below this count");

  int max_len = kDefaultMaxHistory;
  auto* split_cmd = app.add_subcommand(
      "split", "Period split and sequence construction");
  split_cmd->add_option("--max-len", max_len, "History length cap");

  int n_groups = 5;
  bool pop_all_events = false;
  auto* group_cmd = app.add_subcommand("group", "Build the item group scheme");
  group_cmd->add_option("--n-groups", n_groups, "Popularity bucket count");
  group_cmd->add_flag("--pop-all-events", pop_all_events,
                      "Count popularity over all periods, not only training");

  std::string ground_oracles = "oracles_test.bin";
  std::string ground_slates = "slates.jsonl";
  auto* ground_cmd = app.add_subcommand("ground", "K-nearest grounding");
  ground_cmd->add_option("--oracles", ground_oracles, "Oracle embedding file");
  ground_cmd->add_option("--slates-out", ground_slates, "Output slate file");

  std::string eval_slates = "slates.jsonl";
  std::string eval_label = "base";
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Fairness and accuracy");
  evaluate_cmd->add_option("--slates", eval_slates, "Slate file to score");
  evaluate_cmd->add_option("--label", eval_label, "Method label");

  std::size_t sample_size = kDefaultSampleSize;
  auto* reweight_cmd =
      app.add_subcommand("reweight", "Training sample weights");
  reweight_cmd->add_option("--sample-size", sample_size,
                           "Training sample draw size");

  std::string rerank_oracles = "oracles_test.bin";
  std::string rerank_slates = "slates_rerank.jsonl";
  auto* rerank_cmd = app.add_subcommand("rerank", "Punished re-grounding");
  rerank_cmd->add_option("--oracles", rerank_oracles, "Oracle embedding file");
  rerank_cmd->add_option("--slates-out", rerank_slates, "Output slate file");

  std::string sweep_oracles = "oracles_validation.bin";
  std::vector<double> alphas;
  auto* sweep_cmd = app.add_subcommand("sweep", "Alpha sweep on validation");
  sweep_cmd->add_option("--oracles", sweep_oracles, "Validation oracle file");
  sweep_cmd->add_option("--alphas", alphas,
                        "Alphas to evaluate (default 0..0.1 step 0.01)");

  std::vector<std::string> report_inputs;
  auto* report_cmd = app.add_subcommand("report", "Join evaluations into CSVs");
  report_cmd->add_option("inputs", report_inputs,
                         "label=evaluation.json entries");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(g.out_dir);
    if (simulate->parsed()) cmd_simulate(g, sim);
    if (ingest_cmd->parsed())
      cmd_ingest(g, ingest_interactions, ingest_items, min_genre_interactions);
    if (split_cmd->parsed()) cmd_split(g, max_len);
    if (group_cmd->parsed()) cmd_group(g, n_groups, pop_all_events);
    if (ground_cmd->parsed()) cmd_ground(g, ground_oracles, ground_slates);
    if (evaluate_cmd->parsed()) cmd_evaluate(g, eval_slates, eval_label);
    if (reweight_cmd->parsed()) cmd_reweight(g, sample_size);
    if (rerank_cmd->parsed()) cmd_rerank(g, rerank_oracles, rerank_slates);
    if (sweep_cmd->parsed()) cmd_sweep(g, sweep_oracles, alphas);
    if (report_cmd->parsed()) cmd_report(g, report_inputs);
  } catch (const MissingInputError& e) {
    std::cerr << "error (missing input): " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error (internal): " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
