#include "fedalign/dataset.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "fedalign/error.hpp"
#include "fedalign/synthetic.hpp"
#include "unit/test_util.hpp"

using namespace fedalign;

namespace {

TabularDataset parse(const std::string& text, const std::string& label = "TenYearCHD") {
  std::istringstream in(text);
  return parse_csv(in, label);
}

}  // namespace

TEST(LoadCsv, MinimalFile) {
  const auto ds = parse("age,TenYearCHD\n45,0\n61,1\n");
  ASSERT_EQ(ds.n_rows(), 2u);
  ASSERT_EQ(ds.n_features(), 1u);
  EXPECT_EQ(ds.columns[0].name, "age");
  EXPECT_EQ(ds.columns[0].kind, ColumnKind::numeric);
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 1}));
  EXPECT_EQ(std::get<double>(ds.rows[1][0]), 61.0);
}

TEST(LoadCsv, EmptyCellIsMissing) {
  const auto ds = parse("age,glucose,TenYearCHD\n45,,0\n61,90,1\n");
  EXPECT_TRUE(is_missing(ds.rows[0][1]));
  EXPECT_EQ(ds.count_missing(), 1u);
}

TEST(LoadCsv, NaIsMissing) {
  const auto ds = parse("age,glucose,TenYearCHD\n45,NA,0\n61,90,1\n");
  EXPECT_TRUE(is_missing(ds.rows[0][1]));
  EXPECT_EQ(ds.columns[1].kind, ColumnKind::numeric);
}

TEST(LoadCsv, KindInference) {
  const auto ds = parse("sex,smoker,age,TenYearCHD\nM,1,40,0\nF,0,50,1\nM,,61,0\n");
  EXPECT_EQ(ds.columns[0].kind, ColumnKind::categorical);
  EXPECT_EQ(ds.columns[1].kind, ColumnKind::binary);
  EXPECT_EQ(ds.columns[2].kind, ColumnKind::numeric);
  EXPECT_EQ(std::get<std::string>(ds.rows[1][0]), "F");
}

TEST(LoadCsv, LabelIsSeparatedFromFeatures) {
  const auto ds = parse("TenYearCHD,age\n1,45\n0,61\n");
  EXPECT_EQ(ds.label_column, "TenYearCHD");
  ASSERT_EQ(ds.n_features(), 1u);
  EXPECT_EQ(ds.labels, (std::vector<int>{1, 0}));
}

TEST(LoadCsv, QuotedFields) {
  const auto ds = parse("note,TenYearCHD\n\"a b\",0\n\"say \"\"hi\"\"\",1\n");
  EXPECT_EQ(std::get<std::string>(ds.rows[0][0]), "a b");
  EXPECT_EQ(std::get<std::string>(ds.rows[1][0]), "say \"hi\"");
}

TEST(LoadCsv, ArityMismatchNamesLine) {
  try {
    parse("age,TenYearCHD\n45,0\n61\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::malformed_row);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, NonBinaryLabel) {
  EXPECT_FEDALIGN_ERROR(parse("age,TenYearCHD\n45,2\n"), non_binary_label);
  EXPECT_FEDALIGN_ERROR(parse("age,TenYearCHD\n45,yes\n"), non_binary_label);
}

TEST(LoadCsv, MissingLabelColumn) {
  EXPECT_FEDALIGN_ERROR(parse("age,outcome\n45,0\n"), invalid_argument);
}

TEST(LoadCsv, MissingFile) {
  EXPECT_FEDALIGN_ERROR(load_csv("/nonexistent/dir/file.csv", "y"), missing_file);
}

TEST(LoadCsv, WriteReadRoundTrip) {
  test_util::TempDir dir;
  const auto ds = generate_synthetic({200, 0.15, 3});
  write_csv(dir / "d.csv", ds);
  const auto back = load_csv(dir / "d.csv", "TenYearCHD");
  EXPECT_EQ(back, ds);
}

TEST(Impute, NumericMedianEvenCountUsesMiddlePairMean) {
  const auto ds = impute(parse("x,TenYearCHD\n1,0\n3,1\n,0\n"));
  EXPECT_EQ(std::get<double>(ds.rows[2][0]), 2.0);
}

TEST(Impute, NumericMedianOddCount) {
  const auto ds = impute(parse("x,TenYearCHD\n1,0\n7,1\n3,0\n,1\n"));
  EXPECT_EQ(std::get<double>(ds.rows[3][0]), 3.0);
}

TEST(Impute, CategoricalMode) {
  const auto ds = impute(parse("sex,TenYearCHD\nM,0\nM,1\nF,0\n,1\n"));
  EXPECT_EQ(std::get<std::string>(ds.rows[3][0]), "M");
}

TEST(Impute, BinaryUsesMode) {
  const auto ds = impute(parse("flag,TenYearCHD\n0,0\n1,1\n1,0\n,1\n"));
  EXPECT_EQ(std::get<double>(ds.rows[3][0]), 1.0);
}

TEST(Impute, NoMissingRemainAndObservedUnchanged) {
  const auto raw = parse("a,b,TenYearCHD\n1,x,0\n,y,1\n5,,0\n2,x,1\n");
  const auto ds = impute(raw);
  EXPECT_EQ(ds.count_missing(), 0u);
  for (std::size_t r = 0; r < raw.n_rows(); ++r)
    for (std::size_t c = 0; c < raw.n_features(); ++c)
      if (!is_missing(raw.rows[r][c])) EXPECT_EQ(ds.rows[r][c], raw.rows[r][c]);
}

TEST(Impute, Idempotent) {
  const auto once = impute(parse("a,b,TenYearCHD\n1,x,0\n,y,1\n5,,0\n2,x,1\n"));
  EXPECT_EQ(impute(once), once);
}

TEST(Impute, AllMissingColumn) {
  EXPECT_FEDALIGN_ERROR(impute(parse("a,b,TenYearCHD\n1,,0\n2,,1\n")), all_missing_column);
}

TEST(Median, Basics) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_FEDALIGN_ERROR(median({}), invalid_argument);
}

TEST(Synthetic, ShapeAndRate) {
  const auto ds = generate_synthetic({});
  EXPECT_EQ(ds.n_rows(), 4238u);
  EXPECT_EQ(ds.n_features(), 13u);
  EXPECT_EQ(ds.label_column, "TenYearCHD");
  double pos = 0;
  for (int y : ds.labels) pos += y;
  EXPECT_NEAR(pos / static_cast<double>(ds.n_rows()), 0.15, 0.02);
  EXPECT_EQ(ds.count_missing(), 0u);
}

TEST(Synthetic, Deterministic) {
  EXPECT_EQ(generate_synthetic({300, 0.15, 5}), generate_synthetic({300, 0.15, 5}));
  EXPECT_NE(generate_synthetic({300, 0.15, 5}), generate_synthetic({300, 0.15, 6}));
}
