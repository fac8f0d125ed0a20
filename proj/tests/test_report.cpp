#include <gtest/gtest.h>

#include "povkit/report.hpp"

using namespace povkit;

namespace {

RegressionResult table2_col1() {
  ModelSpec s;
  s.dependent = "d_headcount";
  s.regressors = {"d_gini", "gdp_growth"};
  const std::vector<double> est{0.618, 0.011}, se{0.326, 0.037};
  return reported_result(s, est, se, std::pair{-0.007, 0.002}, 856, 0.0977, 77, 77);
}

// Collapses runs of spaces so checks do not depend on column widths.
std::string squeeze(const std::string& text) {
  std::string out;
  for (char c : text)
    if (c != ' ' || out.empty() || out.back() != ' ') out += c;
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

TEST(RenderRegression, ReportedColumn) {
  const auto t = render_table(table2_col1(), Layout::table2);
  const auto ls = lines(t.text);
  ASSERT_GE(ls.size(), 13u);
  EXPECT_NE(ls[2].find("0.618*"), std::string::npos);
  EXPECT_EQ(ls[2].find("0.618**"), std::string::npos);
  EXPECT_NE(ls[3].find("[0.326]"), std::string::npos);
  EXPECT_NE(ls[4].find("0.011"), std::string::npos);
  EXPECT_NE(squeeze(t.text).find("Observations 856\n"), std::string::npos);
  EXPECT_NE(t.text.find("0.0977"), std::string::npos);
  EXPECT_NE(squeeze(t.text).find("Number of country 77\n"), std::string::npos);
  EXPECT_NE(squeeze(t.text).find("Country fixed effects Yes\n"), std::string::npos);
  EXPECT_NE(squeeze(t.text).find("Robust standard error cluster Country\n"), std::string::npos);
}

TEST(RenderRegression, ZeroCoefficientHasNoStars) {
  EXPECT_EQ(format_coefficient(0.0, 0.1, 77), "0.000");
  EXPECT_EQ(format_coefficient(-0.0001, 0.1, 77), "0.000");
  EXPECT_EQ(format_se(0.0374), "[0.037]");
}

TEST(RenderRegression, CsvRoundTrip) {
  const std::vector<RegressionResult> cols{table2_col1(), table2_col1()};
  const auto t = render_table(cols, Layout::table2);
  const auto back = read_regression_csv(t.csv);
  ASSERT_EQ(back.size(), 2u);
  for (const auto& r : back) {
    EXPECT_EQ(r.terms, cols[0].terms);
    EXPECT_EQ(r.coefficients, cols[0].coefficients);
    EXPECT_EQ(r.se("d_gini"), 0.326);
    EXPECT_EQ(r.constant, -0.007);
    EXPECT_EQ(r.n_obs, 856u);
    EXPECT_EQ(r.adjusted_r2, 0.0977);
    EXPECT_EQ(r.n_countries, 77u);
  }
  EXPECT_EQ(render_table(back, Layout::table2).text, t.text);
}

TEST(RenderRegression, LayoutMismatch) {
  try {
    render_table(table2_col1(), Layout::table3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LayoutMismatch);
  }
  EXPECT_THROW(render_table(table2_col1(), Layout::table1), Error);
}

TEST(RenderRegression, InteractionLayouts) {
  ModelSpec s;
  s.dependent = "d_headcount";
  s.regressors = {"d_gini", "gdp_growth", "d_fii"};
  s.interactions = {{"d_gini", "d_fii"}};
  const std::vector<double> est{0.789, 0.005, 0.073, -32.270}, se{0.2, 0.03, 0.05, 14.0};
  const auto r = reported_result(s, est, se, std::pair{-0.007, 0.002}, 856, 0.1, 77, 77);
  const auto t3 = render_table(r, Layout::table3);
  EXPECT_NE(t3.text.find("-32.270**"), std::string::npos);
  EXPECT_NE(t3.text.find("0.789***"), std::string::npos);
  const auto t4 = render_table(r, Layout::table4);
  EXPECT_NE(t4.text.find("Robust standard error clustered"), std::string::npos);
  const std::vector<RegressionResult> one{r};
  const auto generic = render_table(one);
  EXPECT_NE(generic.text.find("\xCE\x94Gini x \xCE\x94" "Financial inclusion index"), std::string::npos);
}

TEST(RenderSummary, Table1Row) {
  SummaryTable t{{"headcount", 0.271, 0.173, 0.25, 0.0, 0.941, 933}, {"d_headcount", -0.007, 0.0, 0.044, -0.388, 0.292, 856}};
  const auto r = render_table(t, Layout::table1);
  EXPECT_NE(squeeze(r.text).find("Headcount 0.271 0.173 0.250 0.000 0.941 933\n"), std::string::npos);
  EXPECT_NE(r.text.find("\xCE\x94Headcount"), std::string::npos);
  const auto back = read_summary_csv(r.csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].mean, 0.271);
  EXPECT_EQ(*back[0].sd, 0.25);
  EXPECT_EQ(back[0].n, 933u);
  EXPECT_EQ(back[1].variable, "d_headcount");
}

TEST(RenderSummary, AbsentSdPrintsMarker) {
  SummaryTable t{{"gini", 0.4, 0.4, std::nullopt, 0.4, 0.4, 1}};
  const auto r = render_table(t, Layout::table1);
  EXPECT_NE(r.text.find("NA"), std::string::npos);
  EXPECT_FALSE(read_summary_csv(r.csv)[0].sd.has_value());
}

TEST(Decomposition, CsvRow) {
  DecompResult d{Measure::headcount, 1.9, 0.0, 0.0, 0.0, 0.0, ReferencePeriod::initial};
  EXPECT_EQ(decomposition_csv(d), "measure,z,total,growth,redistribution,residual\nheadcount,1.9,0,0,0,0\n");
}
