#include "fedalign/partition.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fedalign/alias_table.hpp"
#include "fedalign/error.hpp"
#include "fedalign/synthetic.hpp"
#include "unit/test_util.hpp"

using namespace fedalign;

namespace {

const TabularDataset& synth() {
  static const TabularDataset ds = generate_synthetic({600, 0.15, 21});
  return ds;
}

// Dataset with `pos` positive rows first, then `neg` negatives.
TabularDataset labelled(std::size_t pos, std::size_t neg) {
  TabularDataset ds;
  ds.label_column = "y";
  ds.columns = {{"x", ColumnKind::numeric, {}}};
  for (std::size_t i = 0; i < pos + neg; ++i) {
    ds.rows.push_back({static_cast<double>(i)});
    ds.labels.push_back(i < pos ? 1 : 0);
  }
  return ds;
}

ClientPartition whole(const TabularDataset& ds) {
  ClientPartition p;
  p.client_id = 1;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) p.row_indices.push_back(r);
  return p;
}

}  // namespace

TEST(AliasTable, DefaultsIncludeAttributeTableNames) {
  const auto t = AliasTable::framingham_defaults();
  const auto& age = t.aliases("age");
  for (const char* a : {"PatientAge", "AgeYears"})
    EXPECT_NE(std::find(age.begin(), age.end(), a), age.end()) << a;
  EXPECT_EQ(t.canonical_of("PatientAge"), "age");
  EXPECT_EQ(t.canonical_of("age"), "age");
  EXPECT_FALSE(t.canonical_of("no_such_label").has_value());
}

TEST(AliasTable, RejectsAliasOwnedByAnotherCanonical) {
  AliasTable t;
  t.add("age", {"years"});
  EXPECT_FEDALIGN_ERROR(t.add("tenure", {"years"}), invalid_argument);
}

TEST(AliasTable, RejectsReservedCharacters) {
  AliasTable t;
  EXPECT_FEDALIGN_ERROR(t.add("age", {"age:years"}), invalid_argument);
  EXPECT_FEDALIGN_ERROR(t.add("age", {"age years"}), invalid_argument);
  EXPECT_TRUE(is_valid_label("patient_age-2"));
  EXPECT_FALSE(is_valid_label("a=b"));
}

TEST(AliasTable, FileRoundTripAndShippedDefaults) {
  test_util::TempDir dir;
  const auto t = AliasTable::framingham_defaults();
  save_alias_table(dir / "a.json", t);
  EXPECT_EQ(load_alias_table(dir / "a.json"), t);
  EXPECT_EQ(load_alias_table(std::string(FEDALIGN_DATA_DIR) + "/aliases_default.json"), t);
}

TEST(Partition, ThreeClientsEightSharedThreeUnique) {
  const auto parts = partition(synth(), 3, 8, 3, AliasTable::framingham_defaults(), 1);
  ASSERT_EQ(parts.size(), 3u);
  for (const auto& p : parts) {
    EXPECT_EQ(p.schema.size(), 11u);
    EXPECT_EQ(p.shared_features.size(), 8u);
    EXPECT_EQ(p.unique_features.size(), 3u);
  }
  EXPECT_EQ(parts[0].shared_features, parts[1].shared_features);
  EXPECT_EQ(parts[1].shared_features, parts[2].shared_features);
}

TEST(Partition, DisjointUniqueBlocksWhenTheyFit) {
  const auto parts = partition(synth(), 3, 4, 3, AliasTable::framingham_defaults(), 2);
  std::set<std::string> seen;
  for (const auto& p : parts) {
    for (const auto& u : p.unique_features) {
      EXPECT_TRUE(seen.insert(u).second) << u;
      EXPECT_FALSE(p.shared_features.contains(u));
    }
  }
}

TEST(Partition, RowsCoverAndAreDisjoint) {
  const auto parts = partition(synth(), 3, 8, 3, AliasTable::framingham_defaults(), 3);
  std::vector<std::size_t> all;
  for (const auto& p : parts) all.insert(all.end(), p.row_indices.begin(), p.row_indices.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), synth().n_rows());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  for (const auto& p : parts) {
    const auto n = static_cast<double>(p.row_indices.size());
    EXPECT_NEAR(n, 200.0, 1.0);
  }
}

TEST(Partition, StratifiedWithinTwoPoints) {
  const auto& ds = synth();
  double global = 0;
  for (int y : ds.labels) global += y;
  global /= static_cast<double>(ds.n_rows());
  for (const auto& p : partition(ds, 3, 8, 3, AliasTable::framingham_defaults(), 4)) {
    double pos = 0;
    for (auto r : p.row_indices) pos += ds.labels[r];
    EXPECT_NEAR(pos / static_cast<double>(p.row_indices.size()), global, 0.02);
  }
}

TEST(Partition, AliasSoundnessAndDistinctAliases) {
  const auto& ds = synth();
  const auto aliases = AliasTable::framingham_defaults();
  const auto parts = partition(ds, 3, 8, 3, aliases, 5);
  for (const auto& p : parts) {
    ASSERT_EQ(p.schema.size(), p.source_columns.size());
    for (std::size_t i = 0; i < p.schema.size(); ++i) {
      const auto& name = p.schema[i].name;
      ASSERT_TRUE(p.canonical_of.contains(name));
      EXPECT_EQ(p.canonical_of.at(name), ds.columns[p.source_columns[i]].name);
      EXPECT_EQ(aliases.canonical_of(name), p.canonical_of.at(name));
    }
    std::set<std::string> canon;
    for (const auto& [renamed, c] : p.canonical_of) canon.insert(c);
    std::set<std::string> cover = p.shared_features;
    cover.insert(p.unique_features.begin(), p.unique_features.end());
    EXPECT_EQ(canon, cover);
  }
  // Five aliases per feature: three clients never share a label.
  for (const auto& feature : parts[0].shared_features) {
    std::set<std::string> labels;
    for (const auto& p : parts)
      for (const auto& [renamed, c] : p.canonical_of)
        if (c == feature) labels.insert(renamed);
    EXPECT_EQ(labels.size(), 3u) << feature;
  }
}

TEST(Partition, SingleClientGetsAllRowsSharedOnly) {
  const auto parts = partition(synth(), 1, 8, 3, AliasTable::framingham_defaults(), 6);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].row_indices.size(), synth().n_rows());
  EXPECT_EQ(parts[0].schema.size(), 8u);
  EXPECT_TRUE(parts[0].unique_features.empty());
}

TEST(Partition, Deterministic) {
  const auto a = partition(synth(), 3, 8, 3, AliasTable::framingham_defaults(), 7);
  const auto b = partition(synth(), 3, 8, 3, AliasTable::framingham_defaults(), 7);
  EXPECT_EQ(a, b);
  const auto c = partition(synth(), 3, 8, 3, AliasTable::framingham_defaults(), 8);
  EXPECT_NE(a, c);
}

TEST(Partition, Errors) {
  EXPECT_FEDALIGN_ERROR(partition(synth(), 3, 12, 2, AliasTable{}, 1), insufficient_features);
  EXPECT_FEDALIGN_ERROR(partition(labelled(3, 30), 2, 1, 0, AliasTable{}, 1), insufficient_rows);
}

TEST(OverlapPartition, SharedCountIsRoundedFraction) {
  const auto& ds = synth();  // 13 features
  for (const auto& [f, shared] : std::vector<std::pair<double, std::size_t>>{
           {0.8, 10}, {0.6, 8}, {0.4, 5}, {0.2, 3}}) {
    const auto parts = overlap_partition(ds, 3, f, AliasTable::framingham_defaults(), 1);
    std::size_t total = 0;
    for (const auto& p : parts) {
      EXPECT_EQ(p.shared_features.size(), shared) << f;
      total += p.unique_features.size();
    }
    EXPECT_EQ(total, 13 - shared) << f;
  }
}

TEST(OverlapPartition, TenFeatureExamples) {
  TabularDataset ds = labelled(30, 30);
  ds.columns.clear();
  for (int c = 0; c < 10; ++c) ds.columns.push_back({"f" + std::to_string(c), ColumnKind::numeric, {}});
  for (auto& row : ds.rows) row.assign(10, 1.0);
  const auto p8 = overlap_partition(ds, 2, 0.8, AliasTable{}, 1);
  EXPECT_EQ(p8[0].shared_features.size(), 8u);
  const auto p2 = overlap_partition(ds, 2, 0.2, AliasTable{}, 1);
  EXPECT_EQ(p2[0].shared_features.size(), 2u);
  EXPECT_EQ(p2[0].unique_features.size() + p2[1].unique_features.size(), 8u);
}

TEST(OverlapPartition, FullOverlapIsHomogeneousButAliased) {
  const auto parts = overlap_partition(synth(), 3, 1.0, AliasTable::framingham_defaults(), 1);
  for (const auto& p : parts) {
    EXPECT_EQ(p.shared_features.size(), 13u);
    EXPECT_TRUE(p.unique_features.empty());
  }
  EXPECT_NE(parts[0].schema, parts[1].schema);
}

TEST(OverlapPartition, RejectsOutOfRange) {
  EXPECT_FEDALIGN_ERROR(overlap_partition(synth(), 3, 0.0, AliasTable{}, 1), invalid_argument);
  EXPECT_FEDALIGN_ERROR(overlap_partition(synth(), 3, 1.5, AliasTable{}, 1), invalid_argument);
}

TEST(Split, StratificationArithmetic) {
  const auto ds = labelled(15, 85);
  const auto s = split(ds, whole(ds), {0.8, true, 1});
  ASSERT_EQ(s.train.size(), 80u);
  ASSERT_EQ(s.test.size(), 20u);
  std::size_t pos = 0;
  for (auto r : s.train) pos += static_cast<std::size_t>(ds.labels[r]);
  EXPECT_EQ(pos, 12u);
}

TEST(Split, TwoRowsHalfAndHalf) {
  const auto ds = labelled(1, 1);
  const auto s = split(ds, whole(ds), {0.5, true, 1});
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Split, DisjointCoverSortedDeterministic) {
  const auto ds = labelled(20, 50);
  for (bool strat : {true, false}) {
    const auto a = split(ds, whole(ds), {0.7, strat, 9});
    EXPECT_EQ(a, split(ds, whole(ds), {0.7, strat, 9}));
    EXPECT_TRUE(std::is_sorted(a.train.begin(), a.train.end()));
    EXPECT_TRUE(std::is_sorted(a.test.begin(), a.test.end()));
    std::vector<std::size_t> all = a.train;
    all.insert(all.end(), a.test.begin(), a.test.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, whole(ds).row_indices);
  }
}

TEST(Split, TooFewRows) {
  const auto ds = labelled(1, 0);
  EXPECT_FEDALIGN_ERROR(split(ds, whole(ds), {0.8, true, 1}), too_few_rows);
}
