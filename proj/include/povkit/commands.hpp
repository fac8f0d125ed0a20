#pragma once

// Subcommand implementations behind the povkit executable. Each command
// reads its inputs, writes its outputs under RunConfig::out_dir (or to `out`
// when no directory is given) and reports problems on `err`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "povkit/csv.hpp"
#include "povkit/decomp.hpp"
#include "povkit/dist_measures.hpp"
#include "povkit/error.hpp"
#include "povkit/forecaster.hpp"
#include "povkit/index_builder.hpp"
#include "povkit/panel_ols.hpp"
#include "povkit/panel_store.hpp"
#include "povkit/report.hpp"
#include "povkit/synthetic.hpp"

namespace povkit {

enum class Command { ingest, index, measures, decompose, regress, forecast, report, simulate };

struct RunConfig {
  Command command = Command::report;
  std::map<std::string, std::string> inputs;  // role -> path, e.g. "panel", "fas", "weo"
  std::string out_dir;
  double line = 1.90;
  std::set<IncomeLevel> scope;
  std::optional<Layout> layout;
  std::optional<int> from_year, to_year;

  // ingest
  bool strict = false;
  std::vector<int> waves;  // forward-fill Findex fields from these survey years

  // decompose / measures
  Measure measure = Measure::headcount;
  std::size_t quantiles = kDefaultQuantiles;
  std::size_t lorenz_grid = 1000;
  ReferencePeriod reference = ReferencePeriod::initial;

  // regress
  std::vector<std::string> dependents;
  std::vector<std::string> regressors;
  std::vector<std::pair<std::string, std::string>> interactions;
  Dimension fixed_effect = Dimension::country;
  Dimension cluster = Dimension::country;
  bool constant = true;

  // forecast
  std::size_t model_column = 1;
  ScenarioSuiteOptions scenarios;

  // simulate
  std::uint64_t seed = 42;

  void validate() const {
    if (!(line > 0.0)) fail(ErrorKind::NonpositiveLine, "poverty line must be positive");
    if (from_year && to_year && *from_year > *to_year) fail(ErrorKind::InvalidArgument, "--from-year after --to-year");
  }
};

namespace detail {

inline const std::string& input(const RunConfig& c, const std::string& role) {
  auto it = c.inputs.find(role);
  if (it == c.inputs.end() || it->second.empty()) fail(ErrorKind::InvalidArgument, "missing input --" + role);
  return it->second;
}

inline std::optional<std::string> optional_input(const RunConfig& c, const std::string& role) {
  auto it = c.inputs.find(role);
  if (it == c.inputs.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

class Output {
 public:
  Output(const RunConfig& c, std::ostream& out) : dir_(c.out_dir), out_(out) {
    if (dir_.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) fail(ErrorKind::IoError, "cannot create " + dir_);
  }

  bool to_directory() const { return !dir_.empty(); }

  // Written as a file when an output directory is set, else printed.
  void emit(const std::string& name, const std::string& content) {
    if (dir_.empty()) {
      out_ << content;
    } else {
      csv::write_file((std::filesystem::path(dir_) / name).string(), content);
    }
  }

  void file_only(const std::string& name, const std::string& content) {
    if (!dir_.empty()) csv::write_file((std::filesystem::path(dir_) / name).string(), content);
  }

 private:
  std::string dir_;
  std::ostream& out_;
};

inline IncomeSample read_income_sample(const std::string& path) {
  const auto table = csv::read_table(path);
  auto c_income = table.column("income");
  if (!c_income) fail(ErrorKind::MissingColumn, path + ": income");
  auto c_weight = table.column("weight");
  std::vector<double> y, w;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto where = path + " line " + std::to_string(table.lines[i]);
    auto v = csv::parse_double(*c_income < row.size() ? row[*c_income] : "");
    if (!v) fail(ErrorKind::BadNumeric, where + ": income");
    y.push_back(*v);
    if (c_weight) {
      auto wv = csv::parse_double(*c_weight < row.size() ? row[*c_weight] : "");
      if (!wv) fail(ErrorKind::BadNumeric, where + ": weight");
      w.push_back(*wv);
    }
  }
  return c_weight ? IncomeSample(std::move(y), std::move(w)) : IncomeSample(std::move(y));
}

inline std::string base_field(const std::string& name) { return name.starts_with("d_") ? name.substr(2) : name; }

// Restricts to the configured income groups and year window.
inline AnalysisPanel analysis_window(AnalysisPanel panel, const RunConfig& c) {
  if (!c.scope.empty()) panel = filter_income(panel, c.scope);
  if (c.from_year || c.to_year) panel = filter_years(panel, c.from_year.value_or(kMinYear), c.to_year.value_or(kMaxYear));
  return panel;
}

inline std::string diagnostics_text(const std::string& source, const PanelFragment& f) {
  std::string out;
  for (const auto& d : f.diagnostics)
    out += source + ":" + std::to_string(d.line) + ": " + std::string(error_name(d.kind)) + " [" + d.column + "] " +
           d.message + "\n";
  return out;
}

// Range of `name` over rows where every model variable is present.
inline std::pair<double, double> observed_range(const RegressionData& data, const std::vector<std::string>& names,
                                                const std::string& name) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    bool complete = true;
    for (const auto& n : names) complete = complete && data.columns.at(n)[i].has_value();
    if (!complete) continue;
    const double v = *data.columns.at(name)[i];
    lo = any ? std::min(lo, v) : v;
    hi = any ? std::max(hi, v) : v;
    any = true;
  }
  return {lo, hi};
}

inline std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : " ") + n;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline void run_ingest(const RunConfig& c, std::ostream& out, std::ostream& err) {
  detail::Output o(c, out);
  static const std::vector<std::pair<std::string, Schema>> kSources = {
      {"fas", Schema::fas},       {"povcal", Schema::povcal},         {"weo", Schema::weo},
      {"findex", Schema::findex}, {"population", Schema::population}, {"income_class", Schema::income_class},
      {"panel", Schema::merged}};

  std::vector<PanelFragment> fragments;
  std::optional<PanelFragment> fas;
  std::string report;
  for (const auto& [role, schema] : kSources) {
    auto path = detail::optional_input(c, role);
    if (!path) continue;
    auto frag = load_csv(*path, schema);
    const auto diag = detail::diagnostics_text(*path, frag);
    err << diag;
    report += diag;
    if (c.strict) frag.throw_if_rejected();
    report += role + ": " + std::to_string(frag.rows.size()) + " rows, " + std::to_string(frag.diagnostics.size()) +
              " rejected\n";
    if (schema == Schema::fas) fas = frag;
    fragments.push_back(std::move(frag));
  }
  if (fragments.empty()) fail(ErrorKind::InvalidArgument, "no input files given");

  AnalysisPanel panel = merge_panels(fragments);

  bool fas_has_index = false;
  if (fas)
    for (const auto& r : fas->rows) fas_has_index = fas_has_index || r[Field::fii].has_value();
  if (fas && !fas_has_index) {
    const auto idx = build_indices(merge_panels({*fas}));
    panel = attach_indices(panel, idx);
    report += "index: " + std::to_string(idx.fii.values.size()) + " fii values, " +
              std::to_string(idx.dropped.size()) + " dropped keys\n";
    o.file_only("index_diagnostics.txt", pca_diagnostics(idx));
  }
  if (!c.waves.empty()) {
    const std::array<Field, 3> findex{Field::account_all, Field::account_male, Field::account_female};
    panel = forward_fill_waves(panel, findex, c.waves);
  }
  report += "merged: " + std::to_string(panel.rows().size()) + " rows, " + std::to_string(panel.countries().size()) +
            " countries\n";
  o.emit("merged.csv", write_merged_csv(panel));
  o.file_only("ingest_report.txt", report);
}

inline void run_index(const RunConfig& c, std::ostream& out, std::ostream& err) {
  detail::Output o(c, out);
  auto frag = load_csv(detail::input(c, "fas"), Schema::fas);
  err << detail::diagnostics_text(detail::input(c, "fas"), frag);
  if (c.strict) frag.throw_if_rejected();
  std::vector<PanelFragment> parts{frag};
  if (auto ic = detail::optional_input(c, "income_class")) parts.push_back(load_csv(*ic, Schema::income_class));
  const AnalysisPanel panel = merge_panels(parts);
  const auto idx = build_indices(panel);
  for (const auto& w : idx.warnings) err << "warning: " << w << "\n";

  for (const IndexSeries* s : {&idx.fii, &idx.outreach, &idx.usage}) {
    IndexTable t{*s, panel.names(), panel.income_levels()};
    const auto rendered = render_table(t, Layout::tableA1);
    o.emit(std::string(to_string(s->kind)) + ".csv", rendered.csv);
    o.file_only(std::string(to_string(s->kind)) + ".txt", rendered.text);
  }
  std::string dropped = "iso3,year,stage,reason\n";
  for (const auto& d : idx.dropped)
    dropped += csv::join({d.key.first, std::to_string(d.key.second), d.stage, d.reason}) + "\n";
  o.file_only("dropped.csv", dropped);
  o.emit("diagnostics.txt", pca_diagnostics(idx));
}

inline void run_measures(const RunConfig& c, std::ostream& out, std::ostream&) {
  detail::Output o(c, out);
  const auto sample = detail::read_income_sample(detail::input(c, "sample"));
  o.emit("measures.csv", "line,headcount,poverty_gap,poverty_gap_sq,watts,gini\n" +
                             csv::join({csv::format_exact(c.line), csv::format_exact(headcount(sample, c.line)),
                                        csv::format_exact(poverty_gap(sample, c.line)),
                                        csv::format_exact(poverty_gap_sq(sample, c.line)),
                                        csv::format_exact(watts(sample, c.line)), csv::format_exact(gini(sample))}) +
                             "\n");
}

inline void run_decompose(const RunConfig& c, std::ostream& out, std::ostream&) {
  detail::Output o(c, out);
  const auto a = distribution_from_sample(detail::read_income_sample(detail::input(c, "initial")), c.lorenz_grid);
  const auto b = distribution_from_sample(detail::read_income_sample(detail::input(c, "final")), c.lorenz_grid);
  o.emit("decomposition.csv", decomposition_csv(datt_ravallion(a, b, c.line, c.measure, c.quantiles, c.reference)));
}

// ---------------------------------------------------------------------------
// regress

struct RegressionRun {
  std::vector<RegressionResult> results;
  std::string report;
  std::string marginal_effects_csv;
};

// Fits one model per dependent variable. Differenced names (d_x) are taken
// between consecutive rows of the complete-case sample of their base fields.
inline RegressionRun fit_models(const AnalysisPanel& panel, const RunConfig& c) {
  if (c.dependents.empty()) fail(ErrorKind::InvalidModelSpec, "no dependent variable");
  RegressionRun run;
  std::string me = "column,dependent,of,moderator,moderator_value,estimate,se\n";

  for (std::size_t col = 0; col < c.dependents.size(); ++col) {
    ModelSpec spec;
    spec.dependent = c.dependents[col];
    spec.regressors = c.regressors;
    spec.interactions = c.interactions;
    spec.fixed_effect = c.fixed_effect;
    spec.cluster = c.cluster;
    spec.include_constant = c.constant;
    spec.validate();

    const auto names = spec.required_fields();
    std::vector<Field> bases;
    bool differenced = false;
    for (const auto& n : names) {
      const Field f = field_or_throw(detail::base_field(n));
      if (std::find(bases.begin(), bases.end(), f) == bases.end()) bases.push_back(f);
      differenced = differenced || n.starts_with("d_");
    }
    const AnalysisPanel sample = complete_cases(panel, bases);
    std::string section = "[" + std::to_string(col + 1) + "] " + spec.dependent + "\n";
    section += "level rows with all of";
    for (auto f : bases) section += " " + std::string(field_name(f));
    section += ": " + std::to_string(sample.rows().size()) + " in " + std::to_string(sample.countries().size()) +
               " countries\n";
    RegressionData data;
    if (differenced) {
      const auto diffs = first_difference(sample, bases);
      const auto single = undifferenceable_countries(sample);
      section += "difference rows: " + std::to_string(diffs.size()) + "\n";
      if (!single.empty()) section += "single-observation countries (no differences): " + detail::join_names(single) + "\n";
      data = regression_data(diffs, names);
    } else {
      data = regression_data(sample, names);
    }
    RegressionResult r = fit_fe_ols(data, spec);
    section += "rows used: " + std::to_string(r.n_obs) + " of " + std::to_string(r.dropped.rows_in) + "\n";
    for (const auto& [field, n] : r.dropped.missing_by_field)
      section += "  missing " + field + ": " + std::to_string(n) + "\n";
    run.report += section;

    // Marginal effects over the observed range of each moderator.
    std::map<std::string, std::pair<double, double>> ranges;
    for (const auto& [a, b] : spec.interactions) {
      for (const auto& m : {a, b}) ranges[m] = detail::observed_range(data, names, m);
    }
    for (const auto& term : spec.regressors) {
      std::vector<std::string> partners;
      for (const auto& [a, b] : spec.interactions) {
        if (a == term) partners.push_back(b);
        if (b == term) partners.push_back(a);
      }
      auto row = [&](const std::string& moderator, const std::string& at, const MarginalEffect& e) {
        me += csv::join({std::to_string(col + 1), spec.dependent, term, moderator, at, csv::format_exact(e.estimate),
                         csv::format_exact(e.se)}) +
              "\n";
      };
      if (partners.size() != 1) {
        std::map<std::string, double> at;
        for (const auto& p : partners) at[p] = 0.0;
        row(partners.empty() ? "" : detail::join_names(partners), partners.empty() ? "" : "0",
            marginal_effect(r, term, at));
        continue;
      }
      const auto& m = partners.front();
      const auto [lo, hi] = ranges.at(m);
      constexpr int kPoints = 21;
      for (int k = 0; k < kPoints; ++k) {
        const double v = lo + (hi - lo) * k / (kPoints - 1);
        row(m, csv::format_exact(v), marginal_effect(r, term, {{m, v}}));
      }
    }
    run.results.push_back(std::move(r));
  }
  run.marginal_effects_csv = me;
  return run;
}

inline void run_regress(const RunConfig& c, std::ostream& out, std::ostream&) {
  detail::Output o(c, out);
  const AnalysisPanel panel = detail::analysis_window(load_merged(detail::input(c, "panel")), c);
  const auto run = fit_models(panel, c);
  const auto table = c.layout ? render_table(run.results, *c.layout) : render_table(run.results);
  o.emit("regression.txt", table.text);
  o.file_only("regression.csv", table.csv);
  o.file_only("marginal_effects.csv", run.marginal_effects_csv);
  o.file_only("regression_report.txt", run.report);
}

// ---------------------------------------------------------------------------
// forecast

inline std::map<CountryYear, double> growth_path(const AnalysisPanel& weo, int first, int last, std::string* note) {
  std::map<CountryYear, double> gdp;
  std::size_t actual = 0, forecast = 0;
  for (const auto& r : weo.rows()) {
    if (r.year < first || r.year > last || !r[Field::gdp_growth]) continue;
    gdp[{r.country.iso3, r.year}] = *r[Field::gdp_growth];
    (r.gdp_is_forecast.value_or(false) ? forecast : actual) += 1;
  }
  if (note)
    *note += "gdp growth " + std::to_string(first) + "-" + std::to_string(last) + ": " + std::to_string(actual) +
             " actual, " + std::to_string(forecast) + " forecast values\n";
  return gdp;
}

inline void run_forecast(const RunConfig& c, std::ostream& out, std::ostream& err) {
  detail::Output o(c, out);
  const auto models = read_regression_csv(csv::read_file(detail::input(c, "model")));
  if (c.model_column < 1 || c.model_column > models.size())
    fail(ErrorKind::InvalidArgument, "model column " + std::to_string(c.model_column) + " not in model file");
  const auto coefs = forecast_coefficients(models[c.model_column - 1]);

  const AnalysisPanel panel = load_merged(detail::input(c, "panel"));
  auto weo = load_csv(detail::input(c, "weo"), Schema::weo);
  auto pop = load_csv(detail::input(c, "population"), Schema::population);
  err << detail::diagnostics_text(detail::input(c, "weo"), weo) << detail::diagnostics_text(detail::input(c, "population"), pop);

  std::string report;
  const auto& sc = c.scenarios;
  const auto gdp = growth_path(merge_panels({weo}), sc.first_year, sc.last_year, &report);
  const auto paths = scenario_suite(coefs, panel, gdp, sc);
  const AnalysisPanel population = merge_panels({pop});

  std::set<std::string> scope;
  for (const auto& [iso3, level] : panel.income_levels())
    if (c.scope.contains(level)) scope.insert(iso3);

  std::string paths_csv = "scenario,iso3,year,headcount\n";
  std::string global_csv = "scope,scenario,year,rate,poor_count,population\n";
  std::string scope_name;
  for (auto level : c.scope) scope_name += (scope_name.empty() ? "" : "+") + std::string(to_string(level));

  for (const auto& path : paths) {
    for (const auto& [iso3, cp] : path.countries) {
      paths_csv += csv::join({path.scenario, iso3, std::to_string(cp.base_year), csv::format_exact(cp.base_headcount)}) + "\n";
      for (const auto& [year, h] : cp.headcount)
        paths_csv += csv::join({path.scenario, iso3, std::to_string(year), csv::format_exact(h)}) + "\n";
    }
    std::vector<std::pair<std::string, GlobalPath>> globals{{"all", aggregate_global(path, population)}};
    if (!c.scope.empty()) {
      if (scope.empty()) fail(ErrorKind::UnknownIncomeLevel, "no country in the panel belongs to the scope");
      globals.emplace_back(scope_name, aggregate_global(path, population, scope));
    }
    for (const auto& [name, g] : globals) {
      for (const auto& [year, p] : g.years)
        global_csv += csv::join({name, g.scenario, std::to_string(year), csv::format_exact(p.rate),
                                 csv::format_exact(p.poor_count), csv::format_exact(p.population)}) +
                      "\n";
      report += path.scenario + " " + name + ": " + std::to_string(g.covered.size()) + " countries projected";
      if (!g.uncovered.empty()) report += ", not projected: " + detail::join_names(g.uncovered);
      report += "\n";
      for (const auto& f : g.population_fallbacks) report += "  population fallback " + f + "\n";
    }
    for (const auto& e : path.excluded) report += path.scenario + " excluded " + e.iso3 + " (no " + e.field + ")\n";
  }
  o.file_only("paths.csv", paths_csv);
  o.emit("global.csv", global_csv);
  o.file_only("forecast_report.txt", report);
}

// ---------------------------------------------------------------------------
// report: summary statistics and figure data

inline const std::vector<std::string>& summary_levels() {
  static const std::vector<std::string> v = {"headcount", "poverty_gap", "poverty_gap_sq", "watts",
                                             "gini",      "gdp_growth",  "fii",            "outreach",
                                             "usage",     "account_all", "account_male",   "account_female"};
  return v;
}

// The estimation sample: rows carrying poverty, inequality, growth and FII.
inline AnalysisPanel estimation_sample(const AnalysisPanel& panel) {
  const std::array<Field, 4> core{Field::headcount, Field::gini, Field::gdp_growth, Field::fii};
  return complete_cases(panel, core);
}

inline void run_report(const RunConfig& c, std::ostream& out, std::ostream&) {
  detail::Output o(c, out);
  const AnalysisPanel full = load_merged(detail::input(c, "panel"));
  const AnalysisPanel sample = estimation_sample(detail::analysis_window(full, c));
  if (sample.rows().empty()) fail(ErrorKind::NoObservations, "estimation sample is empty");

  std::vector<std::string> levels, changes;
  std::vector<Field> diff_fields;
  for (const auto& v : summary_levels()) {
    const Field f = field_or_throw(v);
    bool any = false;
    for (const auto& r : sample.rows()) any = any || r[f].has_value();
    if (!any) continue;
    levels.push_back(v);
    changes.push_back("d_" + v);
    if (f != Field::gdp_growth) diff_fields.push_back(f);
  }
  std::erase(changes, "d_gdp_growth");
  const auto diffs = first_difference(sample, diff_fields);

  const auto a = render_table(summarize(sample, levels), Layout::table1);
  const auto b = render_table(summarize(diffs, changes), Layout::table1);
  o.emit("table1.txt", "Panel A: levels\n" + a.text + "\nPanel B: changes\n" + b.text);
  o.file_only("table1.csv", a.csv + b.csv.substr(b.csv.find('\n') + 1));

  // Figure 1: latest FII per country; Figure 2: FII against poverty and inequality.
  std::string fig1 = "iso3,country,income_level,year,fii\n";
  std::map<std::string, const PanelRow*> latest;
  for (const auto& r : full.rows())
    if (r[Field::fii]) latest[r.country.iso3] = &r;
  for (const auto& [iso3, r] : latest)
    fig1 += csv::join({iso3, full.display_name(iso3),
                       r->country.income_level ? std::string(to_string(*r->country.income_level)) : "",
                       std::to_string(r->year), csv::format_exact((*r)[Field::fii])}) +
            "\n";
  o.file_only("figure1_fii.csv", fig1);

  std::string fig2 = "iso3,year,fii,headcount,gini\n";
  for (const auto& r : sample.rows())
    fig2 += csv::join({r.country.iso3, std::to_string(r.year), csv::format_exact(r[Field::fii]),
                       csv::format_exact(r[Field::headcount]), csv::format_exact(r[Field::gini])}) +
            "\n";
  o.file_only("figure2_fii_poverty_gini.csv", fig2);
}

inline void run_simulate(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.out_dir.empty()) fail(ErrorKind::InvalidArgument, "simulate needs --out-dir");
  detail::Output o(c, out);
  SyntheticOptions opts;
  opts.seed = c.seed;
  opts.poverty_line = c.line;
  const auto d = generate_synthetic(opts);
  o.file_only("fas.csv", d.fas);
  o.file_only("povcal.csv", d.povcal);
  o.file_only("weo.csv", d.weo);
  o.file_only("findex.csv", d.findex);
  o.file_only("population.csv", d.population);
  o.file_only("income_class.csv", d.income_class);
  o.file_only("sample_initial.csv", d.sample_initial);
  o.file_only("sample_final.csv", d.sample_final);
}

// Runs one command; module errors become their documented exit codes.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    c.validate();
    switch (c.command) {
      case Command::ingest: run_ingest(c, out, err); break;
      case Command::index: run_index(c, out, err); break;
      case Command::measures: run_measures(c, out, err); break;
      case Command::decompose: run_decompose(c, out, err); break;
      case Command::regress: run_regress(c, out, err); break;
      case Command::forecast: run_forecast(c, out, err); break;
      case Command::report: run_report(c, out, err); break;
      case Command::simulate: run_simulate(c, out, err); break;
    }
  } catch (const Error& e) {
    err << "povkit: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return 0;
}

}  // namespace povkit
