#include <gtest/gtest.h>

#include "rulex/dataset.hpp"
#include "rulex/errors.hpp"

using namespace rulex;

namespace {
const std::string kDataDir = RULEX_DATA_DIR;
}

TEST(LoadCsv, IrisShape) {
  auto raw = load_csv(kDataDir + "/iris.csv", "class");
  EXPECT_EQ(raw.num_rows(), 150u);
  EXPECT_EQ(raw.columns.size(), 5u);
  auto prepared = prepare(raw, MissingPolicy::drop_rows);
  EXPECT_EQ(prepared.data.num_instances(), 150u);
  EXPECT_EQ(prepared.data.num_features(), 4u);
  EXPECT_EQ(prepared.data.num_classes(), 3u);
  EXPECT_EQ(prepared.data.class_counts(), (std::vector<int>{50, 50, 50}));
}

TEST(LoadCsv, MinimalTable) {
  auto raw = parse_csv("a,y\n1,p\n", "y");
  EXPECT_EQ(raw.num_rows(), 1u);
  EXPECT_EQ(raw.target_index(), 1u);
}

TEST(LoadCsv, RaggedRowNamesTheRow) {
  try {
    parse_csv("a,b,y\n1,2,p\n3,q\n4,5,q\n", "y");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(LoadCsv, MissingTargetIsSchemaError) {
  EXPECT_THROW(parse_csv("a,b\n1,2\n", "y"), SchemaError);
}

TEST(LoadCsv, QuotedFieldsAndHeaderless) {
  auto raw = parse_csv("\"1,5\",x\n2,y\n", "1", CsvOptions{false, ','});
  ASSERT_EQ(raw.columns, (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(raw.cells[0][0], "1,5");
}

TEST(Prepare, OneHotExpansion) {
  auto raw = parse_csv("tls,y\nx,a\no,b\nb,a\nx,b\n", "y");
  auto p = prepare(raw, MissingPolicy::drop_rows);
  ASSERT_EQ(p.data.num_features(), 3u);
  EXPECT_EQ(p.data.feature_names(), (std::vector<std::string>{"tls_b", "tls_o", "tls_x"}));
  for (std::size_t j = 0; j < p.data.num_instances(); ++j) {
    double s = 0;
    for (double v : p.data.row(j)) s += v;
    EXPECT_EQ(s, 1.0);
  }
  ASSERT_EQ(p.encoding.columns.size(), 1u);
  EXPECT_EQ(p.encoding.columns[0].kind, ColumnEncoding::Kind::one_hot);
}

TEST(Prepare, ConstantColumnRetained) {
  auto p = prepare(parse_csv("c,y\n7,a\n7,b\n", "y"), MissingPolicy::drop_rows);
  EXPECT_EQ(p.data.num_features(), 1u);
  EXPECT_EQ(p.data.value(0, 0), 7.0);
  EXPECT_EQ(p.data.value(1, 0), 7.0);
}

TEST(Prepare, SingleClassIsDegenerate) {
  EXPECT_THROW(prepare(parse_csv("a,y\n1,p\n2,p\n", "y"), MissingPolicy::drop_rows),
               DegenerateDataError);
  // The second class only appears on a row that gets dropped.
  EXPECT_THROW(prepare(parse_csv("a,y\n1,p\n?,q\n", "y"), MissingPolicy::drop_rows),
               DegenerateDataError);
}

TEST(Prepare, ClassesSortedLexicographically) {
  auto p = prepare(parse_csv("a,y\n1,zeta\n2,alpha\n3,mid\n", "y"), MissingPolicy::drop_rows);
  EXPECT_EQ(p.data.class_names(), (std::vector<std::string>{"alpha", "mid", "zeta"}));
  EXPECT_EQ(p.data.labels(), (std::vector<int>{2, 0, 1}));
}

TEST(Prepare, MissingPolicies) {
  const std::string text = "n,c,y\n1,u,a\n?,v,b\n3,,a\n5,u,b\n";
  auto raw = parse_csv(text, "y");

  auto dropped = prepare(raw, MissingPolicy::drop_rows).data;
  EXPECT_EQ(dropped.num_instances(), 2u);

  auto imputed = prepare(raw, MissingPolicy::impute_mode_mean);
  EXPECT_EQ(imputed.data.num_instances(), 4u);
  EXPECT_DOUBLE_EQ(imputed.data.value(1, 0), 3.0);  // mean of 1, 3, 5
  // Mode of c is "u": row 2 gets c_u = 1.
  EXPECT_EQ(imputed.data.feature_names(), (std::vector<std::string>{"n", "c_u", "c_v"}));
  EXPECT_EQ(imputed.data.value(2, 1), 1.0);

  auto literal = prepare(raw, MissingPolicy::category_as_is);
  EXPECT_EQ(literal.data.num_instances(), 4u);
  const auto& names = literal.data.feature_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "c_?"), names.end());
}

TEST(Prepare, DecodeRoundTrip) {
  const std::string text = "n,c,y\n1.5,u,a\n2,v,b\n-3,w,a\n";
  auto raw = parse_csv(text, "y");
  auto p = prepare(raw, MissingPolicy::drop_rows);
  for (std::size_t j = 0; j < raw.num_rows(); ++j) {
    auto decoded = p.encoding.decode(p.data.row(j));
    EXPECT_EQ(decoded, (std::vector<std::string>{raw.cells[j][0], raw.cells[j][1]}));
  }
}

TEST(Prepare, Deterministic) {
  auto raw = load_csv(kDataDir + "/zoo.csv", "type");
  auto a = prepare(raw, MissingPolicy::category_as_is);
  auto b = prepare(raw, MissingPolicy::category_as_is);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.data.num_classes(), 7u);
}

TEST(Prepare, PolicyNames) {
  for (auto p : {MissingPolicy::drop_rows, MissingPolicy::impute_mode_mean,
                 MissingPolicy::category_as_is})
    EXPECT_EQ(parse_missing_policy(to_string(p)), p);
  EXPECT_THROW(parse_missing_policy("nope"), Error);
}
