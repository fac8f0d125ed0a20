#pragma once

// Publication-style tables. Every text table has a CSV twin carrying full
// precision (regression and summary tables) or the printed precision (index
// tables), and each twin can be read back.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "povkit/csv.hpp"
#include "povkit/decomp.hpp"
#include "povkit/error.hpp"
#include "povkit/index_builder.hpp"
#include "povkit/panel_ols.hpp"
#include "povkit/panel_store.hpp"

namespace povkit {

enum class Layout { table1, table2, table3, table4, tableA1, tableA4 };

inline std::optional<Layout> parse_layout(std::string_view s) {
  if (s == "table1") return Layout::table1;
  if (s == "table2") return Layout::table2;
  if (s == "table3") return Layout::table3;
  if (s == "table4") return Layout::table4;
  if (s == "tableA1") return Layout::tableA1;
  if (s == "tableA4") return Layout::tableA4;
  return std::nullopt;
}

struct RenderedTable {
  std::string text;
  std::string csv;
};

inline std::string variable_label(std::string_view name) {
  static const std::map<std::string_view, std::string_view> kLabels = {
      {"headcount", "Headcount"},
      {"poverty_gap", "Poverty gap"},
      {"poverty_gap_sq", "Poverty gap squared"},
      {"watts", "Watts index"},
      {"gini", "Gini"},
      {"gdp_growth", "GDP growth rate"},
      {"fii", "Financial inclusion index"},
      {"outreach", "Financial outreach"},
      {"usage", "Usage"},
      {"account_all", "Account ownership"},
      {"account_male", "Account ownership (Male)"},
      {"account_female", "Account ownership (Female)"},
      {"population", "Population"},
  };
  if (name.starts_with("d_")) return "\xCE\x94" + variable_label(name.substr(2));
  auto it = kLabels.find(name);
  return it == kLabels.end() ? std::string(name) : std::string(it->second);
}

namespace detail {

// Display width in code points (labels carry the two-byte delta sign).
inline std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

inline std::string pad_right(const std::string& s, std::size_t width) {
  const auto w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

inline std::string pad_left(const std::string& s, std::size_t width) {
  const auto w = display_width(s);
  return w >= width ? s : std::string(width - w, ' ') + s;
}

inline std::string align(const std::vector<std::vector<std::string>>& grid) {
  std::vector<std::size_t> widths;
  for (const auto& row : grid) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t j = 0; j < row.size(); ++j) widths[j] = std::max(widths[j], display_width(row[j]));
  }
  std::string out;
  for (const auto& row : grid) {
    std::string line;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) line += "  ";
      line += j == 0 ? pad_right(row[j], widths[j]) : pad_left(row[j], widths[j]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

struct RegressionLayout {
  std::size_t regressors;
  std::size_t interactions;
  std::vector<std::string> labels;
  std::string cluster_row;
  std::string cluster_value;
};

inline RegressionLayout regression_layout(Layout layout) {
  const std::string d = "\xCE\x94";
  switch (layout) {
    case Layout::table2:
      return {2, 0, {d + " Gini", "GDP growth rate"}, "Robust standard error cluster", "Country"};
    case Layout::table3:
      return {3, 1,
              {d + "Gini", "GDP growth rate", d + "Financial inclusion", d + "Gini x " + d + "Financial inclusion"},
              "Robust standard error cluster", "Country"};
    case Layout::table4:
      return {3, 1,
              {d + "Gini", "GDP growth rate", d + "Account ownership", d + "Gini x " + d + "Account ownership"},
              "Robust standard error clustered", "Yes"};
    case Layout::tableA4:
      return {3, 1, {"Gini", "GDP growth rate", "Financial inclusion", "Gini x Financial inclusion"},
              "Robust standard error cluster", "Country"};
    default: fail(ErrorKind::LayoutMismatch, "layout is not a regression layout");
  }
}

}  // namespace detail

inline std::string format_coefficient(double estimate, double se, std::size_t n_clusters) {
  std::string s = csv::format_fixed(estimate, 3);
  if (se > 0.0 && n_clusters >= 2) s += to_string(significance_stars(estimate, se, n_clusters));
  return s;
}

inline std::string format_se(double se) { return "[" + csv::format_fixed(se, 3) + "]"; }

namespace detail {

inline RenderedTable render_regression(std::span<const RegressionResult> columns, const RegressionLayout& spec) {
  if (columns.empty()) fail(ErrorKind::LayoutMismatch, "no regression columns");
  for (const auto& r : columns) {
    if (r.spec.regressors.size() != spec.regressors || r.spec.interactions.size() != spec.interactions ||
        !r.has_constant)
      fail(ErrorKind::LayoutMismatch, "model for " + r.spec.dependent + " does not match the layout");
  }

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Dependent variable"};
  std::vector<std::string> numbers{""};
  for (std::size_t c = 0; c < columns.size(); ++c) {
    header.push_back(variable_label(columns[c].spec.dependent));
    numbers.push_back(std::to_string(c + 1));
  }
  grid.push_back(header);
  grid.push_back(numbers);

  auto add_term = [&](const std::string& label, auto estimate_of, auto se_of) {
    std::vector<std::string> est{label}, err{""};
    for (const auto& r : columns) {
      est.push_back(format_coefficient(estimate_of(r), se_of(r), r.n_clusters));
      err.push_back(format_se(se_of(r)));
    }
    grid.push_back(est);
    grid.push_back(err);
  };
  for (std::size_t t = 0; t < spec.labels.size(); ++t) {
    add_term(
        spec.labels[t], [t](const RegressionResult& r) { return r.coefficients(static_cast<Eigen::Index>(t)); },
        [t](const RegressionResult& r) { return r.se(r.terms[t]); });
  }
  add_term(
      "Constant", [](const RegressionResult& r) { return r.constant; },
      [](const RegressionResult& r) { return r.constant_se; });

  auto footer = [&](const std::string& label, auto value_of) {
    std::vector<std::string> row{label};
    for (const auto& r : columns) row.push_back(value_of(r));
    grid.push_back(row);
  };
  footer("Observations", [](const RegressionResult& r) { return std::to_string(r.n_obs); });
  footer("Adjusted R\xC2\xB2", [](const RegressionResult& r) { return csv::format_sig(r.adjusted_r2, 3); });
  footer("Number of country", [](const RegressionResult& r) { return std::to_string(r.n_countries); });
  footer("Country fixed effects", [](const RegressionResult&) { return std::string("Yes"); });
  footer(spec.cluster_row, [&](const RegressionResult&) { return spec.cluster_value; });

  RenderedTable out;
  out.text = detail::align(grid);
  out.text += "***, **, and * indicate statistical significance at the 1%, 5%, and 10% levels, respectively.\n";

  out.csv = "column,dependent,kind,term,estimate,se,stars\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& r = columns[c];
    const std::string col = std::to_string(c + 1);
    auto coef_row = [&](const std::string& term, double est, double se) {
      std::string stars = se > 0.0 ? std::string(to_string(significance_stars(est, se, r.n_clusters))) : "";
      out.csv += csv::join({col, r.spec.dependent, "coef", term, csv::format_exact(est), csv::format_exact(se), stars}) + "\n";
    };
    for (std::size_t t = 0; t < r.terms.size(); ++t)
      coef_row(r.terms[t], r.coefficients(static_cast<Eigen::Index>(t)), r.se(r.terms[t]));
    coef_row(std::string(kConstantTerm), r.constant, r.constant_se);
    auto stat_row = [&](const std::string& name, const std::string& value) {
      out.csv += csv::join({col, r.spec.dependent, "stat", name, value, "", ""}) + "\n";
    };
    stat_row("n_obs", std::to_string(r.n_obs));
    stat_row("adjusted_r2", csv::format_exact(r.adjusted_r2));
    stat_row("n_countries", std::to_string(r.n_countries));
    stat_row("n_clusters", std::to_string(r.n_clusters));
  }
  return out;
}

// Labels derived from the first column's terms; all columns must share them.
inline RegressionLayout generic_layout(std::span<const RegressionResult> columns) {
  if (columns.empty()) fail(ErrorKind::LayoutMismatch, "no regression columns");
  RegressionLayout spec{columns[0].spec.regressors.size(), columns[0].spec.interactions.size(), {},
                        "Robust standard error cluster", "Country"};
  for (const auto& r : columns)
    if (r.terms != columns[0].terms) fail(ErrorKind::LayoutMismatch, "columns have different regressors");
  for (const auto& t : columns[0].spec.regressors) spec.labels.push_back(variable_label(t));
  for (const auto& [a, b] : columns[0].spec.interactions)
    spec.labels.push_back(variable_label(a) + " x " + variable_label(b));
  return spec;
}

}  // namespace detail

// One table column per result; rows follow the layout's fixed order.
inline RenderedTable render_table(std::span<const RegressionResult> columns, Layout layout) {
  return detail::render_regression(columns, detail::regression_layout(layout));
}

// Layout-free rendering for arbitrary specifications.
inline RenderedTable render_table(std::span<const RegressionResult> columns) {
  return detail::render_regression(columns, detail::generic_layout(columns));
}

inline RenderedTable render_table(const RegressionResult& result, Layout layout) {
  return render_table(std::span<const RegressionResult>(&result, 1), layout);
}

inline std::vector<RegressionResult> read_regression_csv(std::string_view text) {
  const auto table = csv::parse_table(text);
  for (auto name : {"column", "dependent", "kind", "term", "estimate", "se"})
    if (!table.column(name)) fail(ErrorKind::MissingColumn, name);
  const auto c_col = *table.column("column"), c_dep = *table.column("dependent"), c_kind = *table.column("kind"),
             c_term = *table.column("term"), c_est = *table.column("estimate"), c_se = *table.column("se");

  struct Pending {
    std::string dependent;
    std::vector<std::string> terms;
    std::vector<double> est, se;
    std::optional<std::pair<double, double>> constant;
    std::map<std::string, double> stats;
  };
  std::map<long, Pending> by_column;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() < table.header.size()) fail(ErrorKind::BadNumeric, "short row at line " + std::to_string(table.lines[i]));
    auto col = csv::parse_int(row[c_col]);
    auto est = csv::parse_double(row[c_est]);
    if (!col || !est) fail(ErrorKind::BadNumeric, "line " + std::to_string(table.lines[i]));
    auto& p = by_column[*col];
    p.dependent = row[c_dep];
    if (row[c_kind] == "stat") {
      p.stats[row[c_term]] = *est;
      continue;
    }
    auto se = csv::parse_double(row[c_se]);
    if (!se) fail(ErrorKind::BadNumeric, "se at line " + std::to_string(table.lines[i]));
    if (row[c_term] == kConstantTerm) {
      p.constant = std::pair{*est, *se};
    } else {
      p.terms.push_back(row[c_term]);
      p.est.push_back(*est);
      p.se.push_back(*se);
    }
  }
  std::vector<RegressionResult> out;
  for (auto& [col, p] : by_column) {
    ModelSpec spec;
    spec.dependent = p.dependent;
    for (const auto& t : p.terms) {
      auto colon = t.find(':');
      if (colon == std::string::npos) {
        spec.regressors.push_back(t);
      } else {
        spec.interactions.emplace_back(t.substr(0, colon), t.substr(colon + 1));
      }
    }
    if (spec.terms() != p.terms) fail(ErrorKind::InvalidModelSpec, "interaction terms must follow regressors");
    auto stat = [&](const char* name) { return p.stats.contains(name) ? p.stats.at(name) : 0.0; };
    out.push_back(reported_result(spec, p.est, p.se, p.constant, static_cast<std::size_t>(stat("n_obs")),
                                  p.stats.contains("adjusted_r2") ? p.stats.at("adjusted_r2") : std::nan(""),
                                  static_cast<std::size_t>(stat("n_countries")),
                                  static_cast<std::size_t>(stat("n_clusters"))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summary statistics

inline RenderedTable render_table(const SummaryTable& summary, Layout layout) {
  if (layout != Layout::table1) fail(ErrorKind::LayoutMismatch, "summary statistics render only as table1");
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"", "Mean", "Median", "Standard deviation", "Min", "Max", "NxT"});
  RenderedTable out;
  out.csv = "variable,label,mean,median,sd,min,max,n\n";
  for (const auto& s : summary) {
    const auto label = variable_label(s.variable);
    grid.push_back({label, csv::format_fixed(s.mean, 3), csv::format_fixed(s.median, 3),
                    s.sd ? csv::format_fixed(*s.sd, 3) : "NA", csv::format_fixed(s.min, 3),
                    csv::format_fixed(s.max, 3), std::to_string(s.n)});
    out.csv += csv::join({s.variable, label, csv::format_exact(s.mean), csv::format_exact(s.median),
                          csv::format_exact(s.sd), csv::format_exact(s.min), csv::format_exact(s.max),
                          std::to_string(s.n)}) +
               "\n";
  }
  out.text = detail::align(grid);
  return out;
}

inline SummaryTable read_summary_csv(std::string_view text) {
  const auto table = csv::parse_table(text);
  std::map<std::string, std::size_t> col;
  for (auto name : {"variable", "mean", "median", "sd", "min", "max", "n"}) {
    auto c = table.column(name);
    if (!c) fail(ErrorKind::MissingColumn, name);
    col[name] = *c;
  }
  SummaryTable out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto num = [&](const char* name) {
      auto v = csv::parse_double(row.at(col[name]));
      if (!v) fail(ErrorKind::BadNumeric, std::string(name) + " at line " + std::to_string(table.lines[i]));
      return *v;
    };
    SummaryRow s;
    s.variable = row.at(col["variable"]);
    s.mean = num("mean");
    s.median = num("median");
    s.sd = csv::parse_double(row.at(col["sd"]));
    s.min = num("min");
    s.max = num("max");
    s.n = static_cast<std::size_t>(num("n"));
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Index tables (country rows, year columns)

struct IndexTable {
  IndexSeries series;
  std::map<std::string, std::string> names;
  std::map<std::string, IncomeLevel> income_levels;
};

inline RenderedTable render_table(const IndexTable& t, Layout layout) {
  if (layout != Layout::tableA1) fail(ErrorKind::LayoutMismatch, "index series render only as tableA1");
  std::set<int> years;
  std::set<std::string> countries;
  for (const auto& [key, v] : t.series.values) {
    countries.insert(key.first);
    years.insert(key.second);
  }
  std::vector<std::string> header{"iso3", "Country", "Income Level"};
  for (int y : years) header.push_back(std::to_string(y));

  std::vector<std::vector<std::string>> grid{std::vector<std::string>(header.begin() + 1, header.end())};
  RenderedTable out;
  out.csv = csv::join(header) + "\n";
  for (const auto& iso3 : countries) {
    auto name = t.names.contains(iso3) ? t.names.at(iso3) : iso3;
    auto level = t.income_levels.contains(iso3) ? std::string(display_name(t.income_levels.at(iso3))) : "";
    std::vector<std::string> cells{iso3, name, level};
    for (int y : years) {
      auto it = t.series.values.find({iso3, y});
      cells.push_back(it == t.series.values.end() ? "" : csv::format_fixed(it->second, 3));
    }
    out.csv += csv::join(cells) + "\n";
    grid.emplace_back(cells.begin() + 1, cells.end());
  }
  out.text = detail::align(grid);
  return out;
}

inline IndexTable read_index_table(std::string_view text, IndexKind kind) {
  const auto table = csv::parse_table(text);
  for (auto name : {"iso3", "Country", "Income Level"})
    if (!table.column(name)) fail(ErrorKind::MissingColumn, name);
  IndexTable out;
  out.series.kind = kind;
  std::vector<std::pair<std::size_t, int>> year_cols;
  for (std::size_t j = 0; j < table.header.size(); ++j)
    if (auto y = csv::parse_int(table.header[j])) year_cols.emplace_back(j, static_cast<int>(*y));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto& iso3 = row.at(*table.column("iso3"));
    if (!valid_iso3(iso3)) fail(ErrorKind::InvalidCountryCode, iso3);
    out.names[iso3] = row.at(*table.column("Country"));
    if (auto level = parse_income_level(row.at(*table.column("Income Level")))) out.income_levels[iso3] = *level;
    for (auto [j, year] : year_cols) {
      if (j >= row.size() || csv::is_blank(row[j])) continue;
      auto v = csv::parse_double(row[j]);
      if (!v) fail(ErrorKind::BadNumeric, iso3 + " " + std::to_string(year));
      if (*v < 0.0 || *v > 1.0) fail(ErrorKind::RangeViolation, iso3 + " " + std::to_string(year));
      out.series.values[{iso3, year}] = *v;
    }
  }
  return out;
}

inline std::string pca_diagnostics(const IndexBuildResult& r) {
  std::string out;
  auto stage = [&](const std::string& name, const PcaResult& p) {
    out += name + ".columns=";
    for (std::size_t i = 0; i < p.columns.size(); ++i) out += (i ? "," : "") + p.columns[i];
    out += "\n" + name + ".eigenvalue=" + csv::format_exact(p.eigenvalue) + "\n";
    out += name + ".variance_share=" + csv::format_exact(p.variance_share) + "\n";
    out += name + ".weights=";
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) out += (i ? "," : "") + csv::format_exact(p.weights(i));
    out += "\n";
  };
  stage("outreach", r.outreach_pca);
  stage("fii", r.fii_pca);
  out += "dropped_rows=" + std::to_string(r.dropped.size()) + "\n";
  for (const auto& w : r.warnings) out += "warning=" + w + "\n";
  return out;
}

inline std::string decomposition_csv(const DecompResult& d) {
  return "measure,z,total,growth,redistribution,residual\n" +
         csv::join({std::string(to_string(d.measure)), csv::format_exact(d.z), csv::format_exact(d.total),
                    csv::format_exact(d.growth), csv::format_exact(d.redistribution), csv::format_exact(d.residual)}) +
         "\n";
}

}  // namespace povkit
