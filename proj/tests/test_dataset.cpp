#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "infoiter/dataset.hpp"
#include "test_util.hpp"

using namespace infoiter;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("infoiter_ds_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST(Csv, ThousandRowsThreeNumericColumns) {
  std::ostringstream csv;
  csv << "id,height,weight\n";
  for (int i = 0; i < 1000; ++i) csv << i << "," << 150 + (i % 40) * 0.5 << "," << 60 + i % 25 << "\n";
  auto path = write_temp("1000.csv", csv.str());
  Dataset d = load_csv(path);
  EXPECT_EQ(d.rows(), 1000u);
  ASSERT_EQ(d.columns().size(), 3u);
  EXPECT_EQ(d.column("id").kind(), ScalarKind::Integer);
  EXPECT_EQ(d.column("height").kind(), ScalarKind::Real);
  EXPECT_EQ(d.column("weight").kind(), ScalarKind::Integer);
  EXPECT_EQ(d.column("height").numeric(3), 151.5);
  std::filesystem::remove(path);
}

TEST(Csv, HeaderOnlyIsEmptyDataset) {
  Dataset d = parse_csv_text("a,b\n");
  EXPECT_EQ(d.rows(), 0u);
  EXPECT_EQ(d.columns().size(), 2u);
}

TEST(Csv, NonNumericInHintedColumn) {
  expect_code(ErrorCode::IngestError,
              [] { parse_csv_text("x\n1\nabc\n3\n", {{"x", ScalarKind::Real}}); });
  expect_code(ErrorCode::KindMismatch,
              [] { parse_csv_text("x\n1\n2.5\n", {{"x", ScalarKind::Integer}}); });
}

TEST(Csv, MixedColumnWithoutHintBecomesLabels) {
  Dataset d = parse_csv_text("x\n1\nabc\n3\n");
  EXPECT_EQ(d.column("x").kind(), ScalarKind::Label);
  EXPECT_EQ(d.column("x").value(0), ScalarValue(std::string("1")));
}

TEST(Csv, MissingCells) {
  Dataset d = parse_csv_text("a,b\n1,\n,2.5\n3,4\n");
  EXPECT_EQ(d.rows(), 3u);
  EXPECT_TRUE(d.column("a").is_missing(1));
  EXPECT_TRUE(d.column("b").is_missing(0));
  EXPECT_EQ(d.column("a").missing_count(), 1u);
  EXPECT_EQ(d.column("b").kind(), ScalarKind::Real);
}

TEST(Csv, QuotingFollowsRfc4180) {
  Dataset d = parse_csv_text("name,note\r\n\"Smith, J\",\"said \"\"hi\"\"\"\r\n\"multi\nline\",x\r\n");
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.column("name").value(0), ScalarValue(std::string("Smith, J")));
  EXPECT_EQ(d.column("note").value(0), ScalarValue(std::string("said \"hi\"")));
  EXPECT_EQ(d.column("name").value(1), ScalarValue(std::string("multi\nline")));
}

TEST(Csv, QuotedNumbersAreLabels) {
  Dataset d = parse_csv_text("zip\n\"02139\"\n\"10001\"\n");
  EXPECT_EQ(d.column("zip").kind(), ScalarKind::Label);
}

TEST(Csv, MalformedRowsReportTheLine) {
  try {
    parse_csv_text("a,b\n1,2\n3\n");
    FAIL() << "accepted a short row";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IngestError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  expect_code(ErrorCode::IngestError, [] { parse_csv_text("a\n\"open\n"); });
  expect_code(ErrorCode::IngestError, [] { parse_csv_text(""); });
  expect_code(ErrorCode::IngestError, [] { parse_csv_text("a,a\n1,2\n"); });
}

TEST(Csv, UnknownHintColumn) {
  expect_code(ErrorCode::ParamError, [] { parse_csv_text("a\n1\n", {{"b", ScalarKind::Real}}); });
}

TEST(Csv, MissingFile) {
  expect_code(ErrorCode::IngestError, [] { load_csv("/nonexistent/infoiter.csv"); });
}

TEST(Csv, RoundTrip) {
  Dataset d = parse_csv_text("i,r,l\n1,2.5,\"a,b\"\n,,\n-3,1e-3,x\n");
  Dataset back = parse_csv_text(to_csv(d),
                                {{"i", ScalarKind::Integer}, {"r", ScalarKind::Real}, {"l", ScalarKind::Label}});
  EXPECT_EQ(back, d);
}

TEST(DatasetType, Invariants) {
  Column a("a", ScalarKind::Integer), b("b", ScalarKind::Integer);
  a.push(std::int64_t{1});
  expect_code(ErrorCode::IngestError, [&] { Dataset({a, b}); });
  expect_code(ErrorCode::KindMismatch, [&] { a.push(ScalarValue(1.5)); });
  Dataset ok({a});
  expect_code(ErrorCode::ParamError, [&] { ok.column("zzz"); });
  Column labels("l", ScalarKind::Label);
  labels.push(std::string("x"));
  expect_code(ErrorCode::ParamError, [&] { labels.numeric(0); });
}
