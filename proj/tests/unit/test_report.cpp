#include <gtest/gtest.h>
#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/report.hpp"

using namespace tablerag;

namespace {

RunReport report(ReprConfig cfg, std::string provider, double overall) {
  RunReport r;
  r.config = cfg;
  r.provider = {std::move(provider), 64, ProviderKind::local_hash};
  r.k = 5;
  r.overall_accuracy = overall;
  r.per_type_accuracy = {{QType::E, 100.0}, {QType::M, std::nullopt},
                         {QType::A, 33.333}, {QType::I, 0.0}};
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto nl = s.find('\n', pos);
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

TEST(EmitReport, CsvShape) {
  std::vector<RunReport> reports;
  for (const auto& cfg : full_grid()) reports.push_back(report(cfg, "hash-64", 62.5));
  const auto csv = lines(emit_report(reports, ReportFormat::csv));
  ASSERT_EQ(csv.size(), 17u);
  EXPECT_EQ(csv[0],
            "provider,chunk_level,separator,repeat_header,include_text,k,overall,acc_E,acc_M,"
            "acc_A,acc_I,failed");
  EXPECT_EQ(csv[1], "hash-64,table,pipe,false,false,5,62.5,100.0,,33.3,0.0,false");
  EXPECT_EQ(csv[16], "hash-64,row,space,true,true,5,62.5,100.0,,33.3,0.0,false");
}

TEST(EmitReport, FailedCellAndQuoting) {
  auto r = report({}, "org/model,v2", 0.0);
  r.failed = true;
  r.error = "boom";
  const auto csv = lines(emit_report(std::vector<RunReport>{r}, ReportFormat::csv));
  EXPECT_EQ(csv[1], "\"org/model,v2\",row,pipe,false,false,5,,,,,,true");
}

TEST(EmitReport, EmptyIsAnError) {
  EXPECT_THROW(emit_report({}, ReportFormat::csv), InvalidArgument);
}

TEST(EmitReport, GroupedBarData) {
  std::vector<RunReport> reports;
  for (const auto& cfg : full_grid()) {
    reports.push_back(report(cfg, "p1", 10.0));
    reports.push_back(report(cfg, "p2", 20.0));
  }
  const auto j = nlohmann::json::parse(emit_report(reports, ReportFormat::grouped_bar_data));
  const auto& panels = j.at("panels");
  ASSERT_EQ(panels.size(), 4u);
  const std::pair<std::string, std::string> order[] = {
      {"table", "pipe"}, {"row", "pipe"}, {"table", "space"}, {"row", "space"}};
  for (std::size_t p = 0; p < 4; ++p) {
    EXPECT_EQ(panels[p]["chunk_level"], order[p].first);
    EXPECT_EQ(panels[p]["separator"], order[p].second);
    const auto& groups = panels[p]["groups"];
    ASSERT_EQ(groups.size(), 4u);
    EXPECT_EQ(groups[0]["repeat_header"], false);
    EXPECT_EQ(groups[0]["include_text"], false);
    EXPECT_EQ(groups[1]["repeat_header"], false);
    EXPECT_EQ(groups[1]["include_text"], true);
    EXPECT_EQ(groups[2]["repeat_header"], true);
    EXPECT_EQ(groups[3]["include_text"], true);
    ASSERT_EQ(groups[0]["bars"].size(), 2u);
    EXPECT_EQ(groups[0]["bars"][1]["provider"], "p2");
    EXPECT_EQ(groups[0]["bars"][1]["accuracy"], 20.0);
  }
}

TEST(EmitReport, GroupedBarDataSinglePanel) {
  std::vector<RunReport> reports;
  for (const auto& cfg : full_grid()) {
    if (cfg.chunk_level == ChunkLevel::row && cfg.separator == Separator::pipe) {
      reports.push_back(report(cfg, "p", 1.0));
    }
  }
  const auto j = nlohmann::json::parse(emit_report(reports, ReportFormat::grouped_bar_data));
  ASSERT_EQ(j["panels"].size(), 1u);
  EXPECT_EQ(j["panels"][0]["groups"].size(), 4u);
}

TEST(ReportsToJson, IncludesPerQuestion) {
  auto r = report({}, "p", 50.0);
  r.per_question = {{"q1", QType::E, true, 2}, {"q2", QType::A, false, std::nullopt}};
  const auto j = nlohmann::json::parse(reports_to_json(std::vector<RunReport>{r}));
  EXPECT_EQ(j[0]["per_question"][0]["first_rank"], 2);
  EXPECT_TRUE(j[0]["per_question"][1]["first_rank"].is_null());
  EXPECT_TRUE(j[0]["per_type_accuracy"]["M"].is_null());
}
