#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "povkit/panel_store.hpp"

using namespace povkit;

namespace {

PanelRow make_row(const std::string& iso3, int year, std::initializer_list<std::pair<Field, double>> values) {
  PanelRow r;
  r.country.iso3 = iso3;
  r.year = year;
  for (auto [f, v] : values) r[f] = v;
  return r;
}

PanelFragment fragment(std::vector<PanelRow> rows) {
  PanelFragment f;
  f.rows = std::move(rows);
  return f;
}

}  // namespace

TEST(ParseCsv, FasRowCarriesIndexColumn) {
  auto frag = parse_csv(
      "iso3,country_name,year,branches_per_100k,atms_per_100k,branches_per_1000km2,atms_per_1000km2,"
      "accounts_per_1000,fii\n"
      "AFG,Afghanistan,2004,0.5,0.1,0.2,0.05,12.5,0.019\n",
      Schema::fas);
  ASSERT_EQ(frag.rows.size(), 1u);
  EXPECT_EQ(frag.rows[0].country.iso3, "AFG");
  EXPECT_EQ(frag.rows[0].year, 2004);
  EXPECT_DOUBLE_EQ(*frag.rows[0][Field::fii], 0.019);
  EXPECT_EQ(frag.names.at("AFG"), "Afghanistan");
}

TEST(ParseCsv, EmptyCellIsAbsentNotZero) {
  auto frag = parse_csv("iso3,year,headcount,poverty_gap,poverty_gap_sq,watts,gini\nKEN,2010,0.3,0.1,0.05,0.2,\n",
                        Schema::povcal);
  ASSERT_EQ(frag.rows.size(), 1u);
  EXPECT_FALSE(frag.rows[0][Field::gini].has_value());
  EXPECT_DOUBLE_EQ(*frag.rows[0][Field::headcount], 0.3);
}

TEST(ParseCsv, BadCellRejectsOnlyItsRow) {
  auto frag = parse_csv(
      "iso3,year,headcount,poverty_gap,poverty_gap_sq,watts,gini\n"
      "KEN,2010,0.3,0.1,0.05,0.2,0.4\n"
      "KEN,2011,1.2,0.1,0.05,0.2,0.4\n"
      "KEN,2012,0.25,0.1,0.05,0.2,0.4\n",
      Schema::povcal);
  EXPECT_EQ(frag.rows.size(), 2u);
  ASSERT_EQ(frag.diagnostics.size(), 1u);
  EXPECT_EQ(frag.diagnostics[0].kind, ErrorKind::RangeViolation);
  EXPECT_EQ(frag.diagnostics[0].line, 3u);
  EXPECT_EQ(frag.diagnostics[0].column, "headcount");
  EXPECT_THROW(frag.throw_if_rejected(), Error);
}

TEST(ParseCsv, RowLevelDiagnostics) {
  auto frag = parse_csv(
      "iso3,year,gdp_growth,is_forecast\n"
      "ken,2010,0.05,0\n"
      "KEN,abc,0.05,0\n"
      "KEN,2010,0.05,0\n"
      "KEN,2010,0.06,0\n"
      "KEN,2011,x,0\n"
      "KEN,2012,0.05,2\n",
      Schema::weo);
  ASSERT_EQ(frag.rows.size(), 1u);
  std::vector<ErrorKind> kinds;
  for (const auto& d : frag.diagnostics) kinds.push_back(d.kind);
  EXPECT_EQ(kinds, (std::vector<ErrorKind>{ErrorKind::InvalidCountryCode, ErrorKind::BadNumeric,
                                           ErrorKind::DuplicateKey, ErrorKind::BadNumeric, ErrorKind::BadNumeric}));
}

TEST(ParseCsv, MissingColumnThrows) {
  try {
    parse_csv("iso3,year,headcount\nKEN,2010,0.3\n", Schema::povcal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingColumn);
  }
}

TEST(ParseCsv, PovertyOrderingEnforced) {
  auto frag = parse_csv("iso3,year,headcount,poverty_gap,poverty_gap_sq,watts,gini\nKEN,2010,0.1,0.2,0.05,0.2,0.4\n",
                        Schema::povcal);
  EXPECT_TRUE(frag.rows.empty());
  ASSERT_EQ(frag.diagnostics.size(), 1u);
  EXPECT_EQ(frag.diagnostics[0].kind, ErrorKind::RangeViolation);
}

TEST(ParseCsv, IncomeClass) {
  auto frag = parse_csv("iso3,income_level\nAFG,low\nAUT,High income\nKEN,rich\n", Schema::income_class);
  EXPECT_EQ(frag.income_levels.at("AFG"), IncomeLevel::low);
  EXPECT_EQ(frag.income_levels.at("AUT"), IncomeLevel::high);
  ASSERT_EQ(frag.diagnostics.size(), 1u);
  EXPECT_EQ(frag.diagnostics[0].kind, ErrorKind::UnknownIncomeLevel);
}

TEST(Merge, DisjointFieldsJoin) {
  auto a = fragment({make_row("KEN", 2010, {{Field::gini, 0.40}})});
  auto b = fragment({make_row("KEN", 2010, {{Field::fii, 0.12}})});
  auto p = merge_panels({a, b});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(*p.rows()[0][Field::gini], 0.40);
  EXPECT_DOUBLE_EQ(*p.rows()[0][Field::fii], 0.12);
}

TEST(Merge, ConflictIsError) {
  auto a = fragment({make_row("KEN", 2010, {{Field::gini, 0.40}})});
  auto b = fragment({make_row("KEN", 2010, {{Field::gini, 0.41}})});
  try {
    merge_panels({a, b});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConflictingValue);
  }
}

TEST(Merge, EmptyFragmentIsIdentity) {
  auto a = fragment({make_row("KEN", 2010, {{Field::gini, 0.40}}), make_row("UGA", 2011, {{Field::fii, 0.1}})});
  EXPECT_EQ(merge_panels({a, PanelFragment{}}), merge_panels({a}));
}

TEST(Merge, OrderInsensitive) {
  std::vector<PanelFragment> frags;
  frags.push_back(fragment({make_row("KEN", 2010, {{Field::gini, 0.40}}), make_row("UGA", 2012, {{Field::gini, 0.3}})}));
  frags.push_back(fragment({make_row("KEN", 2010, {{Field::fii, 0.12}}), make_row("KEN", 2011, {{Field::fii, 0.13}})}));
  frags.push_back(fragment({make_row("UGA", 2012, {{Field::population, 4e7}})}));
  frags[0].names["KEN"] = "Kenya";
  frags[1].names["KEN"] = "Kenya, Rep.";
  frags[2].income_levels["UGA"] = IncomeLevel::low;
  const auto reference = merge_panels(frags);
  std::vector<int> order{0, 1, 2};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<PanelFragment> permuted;
    for (int i : order) permuted.push_back(frags[static_cast<std::size_t>(i)]);
    EXPECT_EQ(merge_panels(permuted), reference);
  }
  EXPECT_EQ(reference.display_name("KEN"), "Kenya");
}

TEST(FilterIncome, KeepsSelectedLevels) {
  PanelFragment f = fragment({make_row("AFG", 2004, {{Field::fii, 0.019}}), make_row("AUT", 2004, {{Field::fii, 0.6}})});
  f.income_levels = {{"AFG", IncomeLevel::low}, {"AUT", IncomeLevel::high}};
  const auto p = merge_panels({f});
  const auto kept = filter_income(p, {IncomeLevel::low, IncomeLevel::lower_middle});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.rows()[0].country.iso3, "AFG");
  EXPECT_EQ(filter_income(p, {kAllIncomeLevels.begin(), kAllIncomeLevels.end()}), p);
}

TEST(FilterIncome, UnknownLevelIsError) {
  const auto p = merge_panels({fragment({make_row("AFG", 2004, {{Field::fii, 0.019}})})});
  EXPECT_THROW(filter_income(p, {IncomeLevel::low}), Error);
}

TEST(FirstDifference, SpansGaps) {
  const auto p = merge_panels({fragment({make_row("KEN", 2004, {{Field::headcount, 0.30}}),
                                         make_row("KEN", 2006, {{Field::headcount, 0.25}}),
                                         make_row("KEN", 2008, {{Field::headcount, 0.20}})})});
  const std::array<Field, 1> vars{Field::headcount};
  const auto d = first_difference(p, vars);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].year, 2006);
  EXPECT_EQ(d[0].gap_years, 2);
  EXPECT_NEAR(*d[0].value("d_headcount"), -0.05, 1e-15);
  EXPECT_EQ(d[1].year, 2008);
  EXPECT_NEAR(*d[1].value("d_headcount"), -0.05, 1e-15);
  EXPECT_DOUBLE_EQ(*d[1].value("headcount"), 0.20);
}

TEST(FirstDifference, SingleObservationContributesNothing) {
  const auto p = merge_panels({fragment({make_row("KEN", 2004, {{Field::headcount, 0.30}})})});
  const std::array<Field, 1> vars{Field::headcount};
  EXPECT_TRUE(first_difference(p, vars).empty());
  EXPECT_EQ(undifferenceable_countries(p), std::vector<std::string>{"KEN"});
}

TEST(FirstDifference, RowCountIdentity) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<PanelRow> rows;
    std::size_t expected = 0;
    const int countries = 1 + static_cast<int>(rng() % 20);
    for (int c = 0; c < countries; ++c) {
      const std::string iso3 = std::string("K") + static_cast<char>('A' + c) + "X";
      int n = 0;
      for (int y = 2004; y <= 2018; ++y) {
        if (rng() % 3 == 0) continue;
        rows.push_back(make_row(iso3, y, {{Field::headcount, 0.1}, {Field::gini, 0.4}}));
        ++n;
      }
      expected += static_cast<std::size_t>(std::max(0, n - 1));
    }
    const auto p = merge_panels({fragment(rows)});
    const std::array<Field, 2> vars{Field::headcount, Field::gini};
    EXPECT_EQ(first_difference(p, vars).size(), expected);
  }
}

TEST(ForwardFill, FillsFromLatestEarlierWave) {
  const auto p = merge_panels({fragment({make_row("KEN", 2010, {{Field::gini, 0.4}}),
                                         make_row("KEN", 2011, {{Field::account_all, 0.30}}),
                                         make_row("KEN", 2012, {{Field::gini, 0.4}}),
                                         make_row("KEN", 2013, {{Field::gini, 0.4}, {Field::account_all, 0.33}}),
                                         make_row("KEN", 2014, {{Field::account_all, 0.35}}),
                                         make_row("KEN", 2015, {{Field::gini, 0.4}})})});
  const std::array<Field, 1> fields{Field::account_all};
  const std::array<int, 3> waves{2011, 2014, 2017};
  const auto filled = forward_fill_waves(p, fields, waves);
  EXPECT_FALSE(filled.find("KEN", 2010)->get("account_all").has_value());
  EXPECT_DOUBLE_EQ(*filled.find("KEN", 2012)->get("account_all"), 0.30);
  EXPECT_DOUBLE_EQ(*filled.find("KEN", 2013)->get("account_all"), 0.33);
  EXPECT_DOUBLE_EQ(*filled.find("KEN", 2015)->get("account_all"), 0.35);
  EXPECT_EQ(forward_fill_waves(filled, fields, waves), filled);
}

TEST(Summarize, HandArithmetic) {
  auto s = summarize_values("x", {3, 1, 2});
  EXPECT_DOUBLE_EQ(s.mean, 2);
  EXPECT_DOUBLE_EQ(s.median, 2);
  EXPECT_DOUBLE_EQ(*s.sd, 1);
  EXPECT_DOUBLE_EQ(s.min, 1);
  EXPECT_DOUBLE_EQ(s.max, 3);
  EXPECT_EQ(s.n, 3u);
  auto one = summarize_values("x", {5});
  EXPECT_FALSE(one.sd.has_value());
  EXPECT_EQ(one.n, 1u);
  EXPECT_THROW(summarize_values("x", {}), Error);
}

TEST(Summarize, OrderOfStatistics) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = nd(rng);
    auto s = summarize_values("x", v);
    EXPECT_LE(s.min, s.median);
    EXPECT_LE(s.median, s.max);
  }
}

TEST(MergedCsv, RoundTrip) {
  PanelFragment f = fragment({make_row("KEN", 2010, {{Field::gini, 0.1 + 0.2}, {Field::population, 5.1e7}}),
                              make_row("KEN", 2011, {{Field::headcount, 1.0 / 3.0}, {Field::gdp_growth, -0.0123456789}}),
                              make_row("UGA", 2012, {{Field::fii, 2.0 / 7.0}})});
  f.rows[1].gdp_is_forecast = true;
  f.income_levels = {{"KEN", IncomeLevel::lower_middle}};
  f.names = {{"KEN", "Kenya, \"Republic\""}, {"UGA", "Uganda"}};
  const auto p = merge_panels({f});
  EXPECT_EQ(read_merged_csv(write_merged_csv(p)), p);
}
