#include <gtest/gtest.h>

#include "placenav/eval.hpp"
#include "support.hpp"

namespace placenav::eval {
namespace {

BenchReport sample_report() {
  BenchReport r;
  r.dim = 512;
  r.per_pair_flops = 2'000'000;
  r.repetitions = 5;
  r.rows = {{5, 1234.5, 98765.25, 5}, {21, 1300.0, 400000.125, 21}, {101, 1.0 / 3.0, 2e6, 101}};
  r.embedding_fit = {0.1, 1200.0, 0.5};
  r.pairwise_fit = {19876.0, 1.0 / 7.0, 0.999};
  return r;
}

std::vector<sim::SummaryRow> sample_summary() {
  return {{"bayes", "bursty", 100, 1.0}, {"window", "bursty", 100, 0.78}};
}

TEST(Report, BenchJsonRoundTrip) {
  test::TempDir dir;
  const auto r = sample_report();
  emit_report(r, dir / "b.json", ReportFormat::kJson, "abc");
  const auto j = nlohmann::json::parse(test::read_file(dir / "b.json"));
  EXPECT_EQ(j.at("config_hash"), "abc");
  EXPECT_EQ(bench_report_from_json(j), r);
}

TEST(Report, ReemissionIsByteIdentical) {
  test::TempDir dir;
  emit_report(sample_report(), dir / "a.json", ReportFormat::kJson);
  emit_report(sample_report(), dir / "b.json", ReportFormat::kJson);
  EXPECT_EQ(test::read_file(dir / "a.json"), test::read_file(dir / "b.json"));
  emit_report(sample_summary(), dir / "a.csv", ReportFormat::kCsv);
  emit_report(sample_summary(), dir / "b.csv", ReportFormat::kCsv);
  EXPECT_EQ(test::read_file(dir / "a.csv"), test::read_file(dir / "b.csv"));
}

TEST(Report, CsvHeaders) {
  test::TempDir dir;
  emit_report(sample_summary(), dir / "s.csv", ReportFormat::kCsv);
  const auto text = test::read_file(dir / "s.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "selector,scenario,episodes,success_rate");
  EXPECT_EQ(text, "selector,scenario,episodes,success_rate\nbayes,bursty,100,1\nwindow,bursty,100,0.78\n");
  emit_report(sample_report(), dir / "b.csv", ReportFormat::kCsv);
  const auto bench = test::read_file(dir / "b.csv");
  EXPECT_EQ(bench.substr(0, bench.find('\n')), "candidates,embedding_ns,pairwise_ns,pair_evaluations");
}

TEST(Report, SummaryJsonFields) {
  test::TempDir dir;
  emit_report(sample_summary(), dir / "s.json", ReportFormat::kJson, "h");
  const auto j = nlohmann::json::parse(test::read_file(dir / "s.json"));
  ASSERT_EQ(j.at("rows").size(), 2u);
  EXPECT_EQ(j["rows"][1]["selector"], "window");
  EXPECT_EQ(j["rows"][1]["success_rate"], 0.78);
}

TEST(Report, EmptyInputNeverWritesAFile) {
  test::TempDir dir;
  EXPECT_THROW(emit_report(std::vector<sim::SummaryRow>{}, dir / "s.csv", ReportFormat::kCsv), InvalidArgument);
  EXPECT_THROW(emit_report(BenchReport{}, dir / "b.json", ReportFormat::kJson), InvalidArgument);
  EXPECT_THROW(emit_records({}, dir / "e.jsonl"), InvalidArgument);
  EXPECT_FALSE(std::filesystem::exists(dir / "s.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "b.json"));
}

TEST(Report, UnwritablePathNamesThePath) {
  test::TempDir dir;
  try {
    emit_report(sample_summary(), dir / "missing" / "s.csv", ReportFormat::kCsv);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
}

TEST(Report, JsonlFieldOrder) {
  const std::vector<sim::EpisodeRecord> recs{{"w1", "bayes", "nominal", 3, true, 42, std::nullopt, 0.5},
                                             {"w2", "window", "kidnapped", 4, false, 9, sim::FailureReason::kStuck, 7.25}};
  EXPECT_EQ(to_jsonl(recs),
            "{\"world_id\":\"w1\",\"selector\":\"bayes\",\"scenario\":\"nominal\",\"seed\":3,\"success\":true,"
            "\"steps\":42,\"failure_reason\":null,\"mean_loc_error\":0.5}\n"
            "{\"world_id\":\"w2\",\"selector\":\"window\",\"scenario\":\"kidnapped\",\"seed\":4,\"success\":false,"
            "\"steps\":9,\"failure_reason\":\"stuck\",\"mean_loc_error\":7.25}\n");
}

TEST(Report, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_THROW(parse_format("xml"), InvalidArgument);
}

}  // namespace
}  // namespace placenav::eval
