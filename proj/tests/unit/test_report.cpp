#include <gtest/gtest.h>

#include "support.hpp"
#include "wwwstory/report.hpp"

using namespace wwwstory;
using testing_support::fixture;

namespace {

TriadAnalysis petfish() {
  return analyze_triad(RecordedProvider::load(fixture("petfish-2016.jsonl")), "pet", "fish", "guppy", {"pet", "fish"});
}

}  // namespace

TEST(Format, ThreeSignificantFigures) {
  EXPECT_EQ(format_number(259.04), "2.59e+02");
  EXPECT_EQ(format_number(8.571e-4), "8.57e-04");
  EXPECT_EQ(format_number(1.0), "1.00e+00");
}

TEST(Format, FullPrecisionRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.5, 6.17e5, 1e-300}) {
    EXPECT_EQ(std::stod(format_number(v, true)), v);
  }
  EXPECT_EQ(format_number(2.5, true), "2.5");
}

TEST(Report, JsonCarriesStableFields) {
  auto j = triad_report_json(petfish());
  EXPECT_EQ(j["schema"], "wwwstory.triad/1");
  EXPECT_EQ(j["provenance"]["source"], "recorded_external");
  EXPECT_EQ(j["provenance"]["provider"], "petfish-2016");
  EXPECT_EQ(j["ee"]["ee_class"], "double");
  EXPECT_EQ(j["oe"]["oe_class"], "single_wrt_a");
  EXPECT_TRUE(j["counts"]["n_W"].is_null());
  EXPECT_EQ(j["counts"]["n_AB"], 6.17e5);
  EXPECT_EQ(j["queries"].size(), 10u);
  EXPECT_FALSE(j["consistency"]["all_satisfied"]);
  for (const char* key : {"dominance_direct", "dominance_factor1", "dominance_factor2", "dominance_decomposed"}) {
    EXPECT_TRUE(j["dominance"][key].is_number()) << key;
  }
}

TEST(Report, JsonDeterministic) {
  EXPECT_EQ(triad_report_json(petfish()).dump(), triad_report_json(petfish()).dump());
}

TEST(Report, MarkdownShowsBothDominanceRoutes) {
  auto md = triad_report_markdown(petfish());
  EXPECT_NE(md.find("2.59e+02"), std::string::npos);
  EXPECT_NE(md.find("2.28e+02"), std::string::npos);
  EXPECT_NE(md.find("2.37e+02"), std::string::npos);
  EXPECT_NE(md.find("2.46e+02"), std::string::npos);
  EXPECT_NE(md.find("n_A_B_C <= n_A_C"), std::string::npos);
  auto full = triad_report_markdown(petfish(), true);
  EXPECT_EQ(full.find("2.59e+02"), std::string::npos);
}
