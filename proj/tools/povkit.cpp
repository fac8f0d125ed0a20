#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "povkit/povkit.hpp"

namespace {

std::string exit_code_table() {
  std::string s = "Exit codes:\n  0  success\n  1  command-line usage error\n";
  for (std::size_t i = 0; i < povkit::kErrorNames.size(); ++i) {
    const auto kind = static_cast<povkit::ErrorKind>(i);
    s += "  " + std::to_string(povkit::exit_code(kind)) + " " + std::string(povkit::error_name(kind)) + "\n";
  }
  return s;
}

std::set<povkit::IncomeLevel> parse_scope(const std::vector<std::string>& items) {
  std::set<povkit::IncomeLevel> out;
  for (const auto& s : items) {
    auto level = povkit::parse_income_level(s);
    if (!level) povkit::fail(povkit::ErrorKind::UnknownIncomeLevel, s);
    out.insert(*level);
  }
  return out;
}

std::uint64_t seed_from_env() {
  const char* s = std::getenv("POVKIT_SEED");
  if (!s || !*s) return 42;
  auto v = povkit::csv::parse_int(s);
  if (!v || *v < 0) povkit::fail(povkit::ErrorKind::InvalidArgument, std::string("POVKIT_SEED=") + s);
  return static_cast<std::uint64_t>(*v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"povkit: poverty, inequality and financial-inclusion panel toolkit"};
  app.footer(exit_code_table() + "\nPOVKIT_SEED sets the random seed for `simulate` (default 42).");
  app.require_subcommand(1);

  povkit::RunConfig cfg;
  std::string scope_text, layout_text, measure_text = "headcount", reference_text = "initial";
  std::vector<std::string> scope_items, interact_items;
  std::string fe_text = "country", cluster_text = "country";
  bool no_constant = false;

  auto input = [&](CLI::App* sub, const std::string& role, const std::string& help, bool required) {
    auto* opt = sub->add_option("--" + role, cfg.inputs[role], help);
    if (required) opt->required();
  };
  auto out_dir = [&](CLI::App* sub) { sub->add_option("--out-dir", cfg.out_dir, "Output directory (default: stdout)"); };
  auto window = [&](CLI::App* sub) {
    sub->add_option("--scope", scope_items, "Income groups to keep, e.g. low,lower_middle")->delimiter(',');
    sub->add_option("--from-year", cfg.from_year, "First year of the analysis window");
    sub->add_option("--to-year", cfg.to_year, "Last year of the analysis window");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate and merge source CSVs into one panel (merged.csv)");
  for (auto role : {"fas", "povcal", "weo", "findex", "population"})
    input(ingest, role, std::string(role) + " CSV", false);
  input(ingest, "income_class", "iso3,income_level CSV", false);
  input(ingest, "panel", "previously merged panel to include", false);
  ingest->add_flag("--strict", cfg.strict, "Fail on the first rejected row instead of reporting it");
  ingest->add_option("--fill-waves", cfg.waves, "Carry Findex values forward from these survey years")->delimiter(',');
  out_dir(ingest);

  auto* index = app.add_subcommand("index", "Financial inclusion indices");
  auto* index_build = index->add_subcommand("build", "Build outreach, usage and FII from FAS indicators");
  index->require_subcommand(1);
  input(index_build, "fas", "FAS indicator CSV", true);
  input(index_build, "income_class", "iso3,income_level CSV for the Income Level column", false);
  index_build->add_flag("--strict", cfg.strict, "Fail on the first rejected row");
  out_dir(index_build);

  auto* measures = app.add_subcommand("measures", "Poverty and inequality measures of one income sample");
  input(measures, "sample", "income[,weight] CSV", true);
  measures->add_option("--line", cfg.line, "Poverty line (default 1.90)");
  out_dir(measures);

  auto* decompose = app.add_subcommand("decompose", "Growth/redistribution decomposition of a poverty change");
  input(decompose, "initial", "income[,weight] CSV, initial period", true);
  input(decompose, "final", "income[,weight] CSV, final period", true);
  decompose->add_option("--line", cfg.line, "Poverty line (default 1.90)");
  decompose->add_option("--measure", measure_text, "headcount | gap | gap_sq | watts");
  decompose->add_option("--quantiles", cfg.quantiles, "Quantiles used to evaluate P(mean, Lorenz)");
  decompose->add_option("--lorenz-grid", cfg.lorenz_grid, "Lorenz curve grid points");
  decompose->add_option("--reference", reference_text, "initial | final");
  out_dir(decompose);

  auto* regress = app.add_subcommand("regress", "Country fixed-effects regression with clustered errors");
  input(regress, "panel", "merged panel CSV", true);
  regress->add_option("--dep", cfg.dependents, "Dependent variable(s), one table column each")->delimiter(',')->required();
  regress->add_option("--x", cfg.regressors, "Regressors; d_<field> takes first differences")->delimiter(',')->required();
  regress->add_option("--interact", interact_items, "Interactions a:b")->delimiter(',');
  regress->add_option("--fe", fe_text, "Fixed effect dimension (country)");
  regress->add_option("--cluster", cluster_text, "Cluster dimension (country)");
  regress->add_flag("--no-constant", no_constant, "Do not report a constant");
  regress->add_option("--layout", layout_text, "table2 | table3 | table4 | tableA4");
  window(regress);
  out_dir(regress);

  auto* forecast = app.add_subcommand("forecast", "Scenario projections of headcount poverty");
  input(forecast, "model", "regression.csv from `regress`", true);
  input(forecast, "panel", "merged panel CSV", true);
  input(forecast, "weo", "GDP growth CSV with is_forecast", true);
  input(forecast, "population", "population CSV", true);
  forecast->add_option("--model-column", cfg.model_column, "Column of the model file to use (default 1)");
  forecast->add_option("--scope", scope_items, "Income groups for the restricted aggregate")->delimiter(',');
  forecast->add_option("--first-year", cfg.scenarios.first_year, "First projected year");
  forecast->add_option("--last-year", cfg.scenarios.last_year, "Last projected year");
  forecast->add_option("--shock-year", cfg.scenarios.shock_year, "Year the Gini/FII shocks apply");
  forecast->add_option("--gini-shock", cfg.scenarios.gini_shock, "S2 Gini shock (default 0.01)");
  forecast->add_option("--fii-shock", cfg.scenarios.fii_shock, "S3 FII shock (default 0.10)");
  bool absolute = false;
  forecast->add_flag("--absolute-shocks", absolute, "Shocks are absolute changes, not fractions of the level");
  forecast->add_flag("--repeat-shocks", cfg.scenarios.shocks.repeat, "Re-apply shocks every year after the shock year");
  out_dir(forecast);

  auto* report = app.add_subcommand("report", "Summary statistics (levels and changes) and figure data");
  input(report, "panel", "merged panel CSV", true);
  window(report);
  out_dir(report);

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset in the input schemas");
  simulate->add_option("--line", cfg.line, "Poverty line used for the povcal measures");
  simulate->add_option("--out-dir", cfg.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    cfg.scope = parse_scope(scope_items);
    if (!layout_text.empty()) {
      cfg.layout = povkit::parse_layout(layout_text);
      if (!cfg.layout) povkit::fail(povkit::ErrorKind::LayoutMismatch, "unknown layout " + layout_text);
    }
    auto measure = povkit::parse_measure(measure_text);
    if (!measure) povkit::fail(povkit::ErrorKind::InvalidArgument, "unknown measure " + measure_text);
    cfg.measure = *measure;
    if (reference_text != "initial" && reference_text != "final")
      povkit::fail(povkit::ErrorKind::InvalidArgument, "reference must be initial or final");
    cfg.reference = reference_text == "final" ? povkit::ReferencePeriod::final : povkit::ReferencePeriod::initial;
    auto fe = povkit::parse_dimension(fe_text);
    auto cluster = povkit::parse_dimension(cluster_text);
    if (!fe || !cluster) povkit::fail(povkit::ErrorKind::InvalidModelSpec, "only country fixed effects and clusters");
    cfg.fixed_effect = *fe;
    cfg.cluster = *cluster;
    cfg.constant = !no_constant;
    for (const auto& item : interact_items) {
      auto colon = item.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
        povkit::fail(povkit::ErrorKind::InvalidModelSpec, "interaction must be a:b, got " + item);
      cfg.interactions.emplace_back(item.substr(0, colon), item.substr(colon + 1));
    }
    cfg.scenarios.shocks.relative = !absolute;
    cfg.seed = seed_from_env();
  } catch (const povkit::Error& e) {
    std::cerr << "povkit: " << e.what() << "\n";
    return povkit::exit_code(e.kind());
  }

  if (*ingest) cfg.command = povkit::Command::ingest;
  else if (*index) cfg.command = povkit::Command::index;
  else if (*measures) cfg.command = povkit::Command::measures;
  else if (*decompose) cfg.command = povkit::Command::decompose;
  else if (*regress) cfg.command = povkit::Command::regress;
  else if (*forecast) cfg.command = povkit::Command::forecast;
  else if (*report) cfg.command = povkit::Command::report;
  else cfg.command = povkit::Command::simulate;
  return povkit::run(cfg);
}
