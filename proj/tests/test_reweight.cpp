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

#include <cmath>

#include "doctest.h"
#include "ifair/reweight.hpp"
#include "test_util.hpp"

using namespace ifair;

namespace {

Sequence train_seq(const std::string& ref, std::vector<ItemId> history,
                   ItemId target) {
  Sequence seq;
  seq.ref = ref;
  seq.user = "u";
  seq.history = std::move(history);
  seq.target = std::move(target);
  seq.split = SplitPart::train;
  return seq;
}

}  // namespace

TEST_CASE("split_tr_ta aligns histories and targets") {
  const std::vector<Sequence> sequences = {train_seq("0", {"a", "b"}, "c")};
  const auto [histories, targets] = split_tr_ta(sequences);
  REQUIRE(histories.size() == 1);
  REQUIRE(targets.size() == 1);
  CHECK(histories[0] == std::vector<ItemId>{"a", "b"});
  CHECK(targets[0] == "c");

  SUBCASE("n sequences produce n of each") {
    std::vector<Sequence> more;
    for (int i = 0; i < 7; ++i)
      more.push_back(train_seq(std::to_string(i), {"a"}, "b"));
    const auto [h, t] = split_tr_ta(more);
    CHECK(h.size() == 7);
    CHECK(t.size() == 7);
  }
  SUBCASE("non-training sequences are rejected") {
    auto mixed = sequences;
    mixed.push_back(train_seq("1", {"a"}, "b"));
    mixed.back().split = SplitPart::test;
    CHECK_THROWS_AS(split_tr_ta(mixed), ValidationError);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(split_tr_ta({}), ValidationError);
  }
}

TEST_CASE("group weights follow the history-to-target ratio") {
  SUBCASE("skewed group doubles") {
    const auto w = group_weights({{"A", 0.5}, {"B", 0.5}},
                                 {{"A", 0.25}, {"B", 0.75}});
    CHECK(w.at("A") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.at("B") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("balanced data gives unit weights") {
    const std::map<GroupLabel, double> same = {{"A", 0.3}, {"B", 0.7}};
    for (const auto& [group, w] : group_weights(same, same))
      CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("target-free groups default to 1 with a warning") {
    std::vector<std::string> warnings;
    const auto w = group_weights({{"A", 0.5}, {"B", 0.5}},
                                 {{"A", 1.0}, {"B", 0.0}}, &warnings);
    CHECK(w.at("B") == 1.0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("B") != std::string::npos);
  }
  SUBCASE("mismatched group sets are rejected") {
    CHECK_THROWS_AS(group_weights({{"A", 1.0}}, {{"B", 1.0}}), ValidationError);
  }
}

TEST_CASE("sample weights average the target's group weights") {
  GroupScheme scheme("s", {"A", "B"},
                     {{"both", {"A", "B"}}, {"onlyA", {"A"}}, {"bare", {}}});
  const std::map<GroupLabel, double> w = {{"A", 2.0}, {"B", 2.0 / 3.0}};

  SUBCASE("two-group target") {
    const auto out = sample_weights({{"0", "both"}}, scheme, w);
    CHECK(out.at("0") == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("single-group target") {
    const auto out = sample_weights({{"0", "onlyA"}}, scheme, w);
    CHECK(out.at("0") == 2.0);
  }
  SUBCASE("group-less target defaults to 1 with a warning") {
    std::vector<std::string> warnings;
    const auto out = sample_weights({{"0", "bare"}}, scheme, w, &warnings);
    CHECK(out.at("0") == 1.0);
    CHECK(warnings.size() == 1);
  }
}

TEST_CASE("weighted loss is the weighted sum") {
  WeightTable table;
  table.sample_weights = {{"s1", 0.5}, {"s2", 1.5}};
  CHECK(weighted_loss({{"s1", 2.0}, {"s2", 4.0}}, table) ==
        doctest::Approx(7.0).epsilon(1e-15));

  SUBCASE("unit weights reduce to the plain sum") {
    WeightTable unit;
    unit.sample_weights = {{"s1", 1.0}, {"s2", 1.0}};
    CHECK(weighted_loss({{"s1", 2.0}, {"s2", 4.0}}, unit) == 6.0);
  }
  SUBCASE("empty loss map sums to zero") {
    CHECK(weighted_loss({}, table) == 0.0);
  }
  SUBCASE("missing weight names the key") {
    try {
      weighted_loss({{"s9", 1.0}}, table);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("s9") != std::string::npos);
    }
  }
  SUBCASE("power-of-two loss scaling is exact") {
    const double base = weighted_loss({{"s1", 2.0}, {"s2", 4.0}}, table);
    CHECK(weighted_loss({{"s1", 8.0}, {"s2", 16.0}}, table) == 4.0 * base);
  }
}

TEST_CASE("weight table end to end") {
  GroupScheme scheme("pop", {"lo", "hi"}, {{"a", {"lo"}}, {"b", {"hi"}}});
  // histories hold a and b evenly; targets hold b three times out of four
  std::vector<Sequence> sequences = {
      train_seq("0", {"a", "b"}, "b"), train_seq("1", {"a", "b"}, "b"),
      train_seq("2", {"a", "b"}, "b"), train_seq("3", {"a", "b"}, "a")};
  const auto table = build_weight_table(sequences, scheme);
  CHECK(table.scheme == "pop");
  CHECK(table.gh_tr.at("lo") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(table.gh_ta.at("hi") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(table.group_weights.at("lo") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(table.group_weights.at("hi") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(table.sample_weights.at("0") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(table.sample_weights.at("3") == doctest::Approx(2.0).epsilon(1e-12));

  SUBCASE("all weights are strictly positive and finite") {
    for (const auto& [group, w] : table.group_weights) {
      CHECK(w > 0.0);
      CHECK(std::isfinite(w));
    }
    for (const auto& [ref, w] : table.sample_weights) {
      CHECK(w > 0.0);
      CHECK(std::isfinite(w));
    }
  }
  SUBCASE("weighted target mass is proportional to gh_tr") {
    // single-membership scheme: sum of W_i over targets in G against gh_tr(G)
    std::map<GroupLabel, double> mass;
    for (const auto& seq : sequences)
      mass[scheme.groups_of(seq.target)[0]] +=
          table.sample_weights.at(seq.ref);
    const double ratio_lo = mass.at("lo") / table.gh_tr.at("lo");
    const double ratio_hi = mass.at("hi") / table.gh_tr.at("hi");
    CHECK(std::fabs(ratio_lo - ratio_hi) < 1e-9);
  }
  SUBCASE("balanced sequences give unit weights within 1e-12") {
    std::vector<Sequence> balanced = {train_seq("0", {"a", "b"}, "a"),
                                      train_seq("1", {"b", "a"}, "b")};
    const auto unit = build_weight_table(balanced, scheme);
    for (const auto& [ref, w] : unit.sample_weights)
      CHECK(std::fabs(w - 1.0) <= 1e-12);
  }
}

TEST_CASE("weights TSV export carries provenance headers") {
  GroupScheme scheme("pop", {"g"}, {{"a", {"g"}}});
  const auto table = build_weight_table(
      {train_seq("0", {"a"}, "a"), train_seq("1", {"a"}, "a")}, scheme);
  ifair_test::TempDir tmp;
  write_weights_tsv(table, 1234, tmp.file("weights.tsv"));
  const auto text = ifair_test::slurp(tmp.file("weights.tsv"));
  CHECK(text.find("# scheme: pop") != std::string::npos);
  CHECK(text.find("# seed: 1234") != std::string::npos);
  CHECK(text.find("sequence_ref\tweight") != std::string::npos);
  CHECK(text.find("0\t1") != std::string::npos);
}
