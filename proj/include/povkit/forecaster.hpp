#pragma once

// Scenario projections of headcount poverty from a fitted change equation
//   dP = const + b dGini + g growth + d dFII + f dGini dFII
// and their population-weighted aggregation.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "povkit/error.hpp"
#include "povkit/panel_ols.hpp"
#include "povkit/panel_store.hpp"

namespace povkit {

struct ForecastCoefficients {
  double constant = 0.0;
  double gini = 0.0;
  double growth = 0.0;
  double fii = 0.0;
  double interaction = 0.0;
};

struct CoefficientNames {
  std::string gini = "d_gini";
  std::string growth = "gdp_growth";
  std::string fii = "d_fii";
};

inline ForecastCoefficients forecast_coefficients(const RegressionResult& model, const CoefficientNames& names = {}) {
  ForecastCoefficients c;
  c.gini = model.coef(names.gini);
  c.growth = model.coef(names.growth);
  c.fii = model.coef(names.fii);
  if (model.index_of(interaction_name(names.gini, names.fii))) {
    c.interaction = model.coef(interaction_name(names.gini, names.fii));
  } else {
    c.interaction = model.coef(interaction_name(names.fii, names.gini));
  }
  c.constant = model.has_constant ? model.constant : 0.0;
  return c;
}

struct ShockOptions {
  bool relative = true;  // shock is a fraction of the country's current level
  bool repeat = false;   // re-apply in every year after shock_year
};

struct Scenario {
  std::string name;
  int first_year = 2019;
  int last_year = 2021;
  std::map<CountryYear, double> gdp_growth;
  double gini_shock = 0.0;
  double fii_shock = 0.0;
  int shock_year = 2020;
  ShockOptions shocks;

  void validate() const {
    if (first_year > last_year) fail(ErrorKind::InvalidScenario, name + ": empty projection range");
    if (shock_year < first_year || shock_year > last_year)
      fail(ErrorKind::InvalidScenario, name + ": shock year outside projection range");
  }
};

struct CountryPath {
  int base_year = 0;
  double base_headcount = 0.0;
  std::map<int, double> headcount;
};

struct Exclusion {
  std::string iso3;
  std::string field;
};

struct ForecastPath {
  std::string scenario;
  int first_year = 0;
  int last_year = 0;
  std::map<std::string, CountryPath> countries;
  std::vector<Exclusion> excluded;
};

namespace detail {

inline std::optional<std::pair<int, double>> last_observed(const AnalysisPanel& panel, std::string_view iso3,
                                                           Field f, int before_year) {
  std::optional<std::pair<int, double>> out;
  for (const auto& r : panel.rows())
    if (r.country.iso3 == iso3 && r.year < before_year && r[f]) out = std::pair{r.year, *r[f]};
  return out;
}

}  // namespace detail

// Each country starts from its last headcount observed before first_year.
inline ForecastPath project(const ForecastCoefficients& c, const AnalysisPanel& base, const Scenario& s) {
  s.validate();
  ForecastPath path;
  path.scenario = s.name;
  path.first_year = s.first_year;
  path.last_year = s.last_year;

  for (const auto& iso3 : base.countries()) {
    auto p0 = detail::last_observed(base, iso3, Field::headcount, s.first_year);
    auto gini0 = detail::last_observed(base, iso3, Field::gini, s.first_year);
    auto fii0 = detail::last_observed(base, iso3, Field::fii, s.first_year);
    if (!p0) { path.excluded.push_back({iso3, "headcount"}); continue; }
    if (!gini0) { path.excluded.push_back({iso3, "gini"}); continue; }
    if (!fii0) { path.excluded.push_back({iso3, "fii"}); continue; }

    CountryPath cp;
    cp.base_year = p0->first;
    cp.base_headcount = p0->second;
    double p = p0->second;
    double gini = gini0->second;
    double fii = fii0->second;
    bool complete = true;
    for (int t = s.first_year; t <= s.last_year; ++t) {
      auto g = s.gdp_growth.find({iso3, t});
      if (g == s.gdp_growth.end()) {
        path.excluded.push_back({iso3, "gdp_growth " + std::to_string(t)});
        complete = false;
        break;
      }
      const bool shock_now = t == s.shock_year || (s.shocks.repeat && t > s.shock_year);
      double d_gini = 0.0, d_fii = 0.0;
      if (shock_now) {
        d_gini = s.shocks.relative ? s.gini_shock * gini : s.gini_shock;
        d_fii = s.shocks.relative ? s.fii_shock * fii : s.fii_shock;
      }
      gini += d_gini;
      fii += d_fii;
      const double dp = c.constant + c.gini * d_gini + c.growth * g->second + c.fii * d_fii +
                        c.interaction * d_gini * d_fii;
      p = std::clamp(p + dp, 0.0, 1.0);
      cp.headcount[t] = p;
    }
    if (complete) path.countries.emplace(iso3, std::move(cp));
  }
  if (path.countries.empty()) {
    std::string detail = path.excluded.empty() ? "empty base panel"
                                               : path.excluded.front().iso3 + ": " + path.excluded.front().field;
    fail(ErrorKind::NoBaseValue, "no country can be projected (" + detail + ")");
  }
  return path;
}

inline ForecastPath project(const RegressionResult& model, const AnalysisPanel& base, const Scenario& s,
                            const CoefficientNames& names = {}) {
  return project(forecast_coefficients(model, names), base, s);
}

struct ScenarioSuiteOptions {
  int first_year = 2019;
  int last_year = 2021;
  int shock_year = 2020;
  double gini_shock = 0.01;
  double fii_shock = 0.10;
  ShockOptions shocks;
};

// S1: growth path only; S2: plus a Gini shock; S3: plus an FII shock.
inline std::array<ForecastPath, 3> scenario_suite(const ForecastCoefficients& c, const AnalysisPanel& base,
                                                  const std::map<CountryYear, double>& gdp,
                                                  const ScenarioSuiteOptions& o = {}) {
  Scenario s1{"S1", o.first_year, o.last_year, gdp, 0.0, 0.0, o.shock_year, o.shocks};
  Scenario s2 = s1;
  s2.name = "S2";
  s2.gini_shock = o.gini_shock;
  Scenario s3 = s1;
  s3.name = "S3";
  s3.fii_shock = o.fii_shock;
  return {project(c, base, s1), project(c, base, s2), project(c, base, s3)};
}

// ---------------------------------------------------------------------------
// Aggregation

struct GlobalPoint {
  double rate = 0.0;
  double poor_count = 0.0;
  double population = 0.0;
};

struct GlobalPath {
  std::string scenario;
  std::map<int, GlobalPoint> years;  // includes first_year - 1 as the base point
  std::vector<std::string> covered;
  std::vector<std::string> uncovered;  // in scope but not projected
  std::vector<std::string> population_fallbacks;
};

inline GlobalPath aggregate_global(const ForecastPath& path, const AnalysisPanel& population,
                                   const std::set<std::string>& scope = {}) {
  GlobalPath out;
  out.scenario = path.scenario;
  for (const auto& iso3 : scope)
    if (!path.countries.contains(iso3)) out.uncovered.push_back(iso3);

  std::map<std::string, std::map<int, double>> pops;
  for (const auto& r : population.rows())
    if (r[Field::population]) pops[r.country.iso3][r.year] = *r[Field::population];

  auto population_at = [&](const std::string& iso3, int year) {
    auto it = pops.find(iso3);
    if (it == pops.end() || it->second.empty()) fail(ErrorKind::MissingPopulation, iso3);
    const auto& series = it->second;
    if (auto exact = series.find(year); exact != series.end()) return exact->second;
    auto after = series.upper_bound(year);
    const auto& used = after == series.begin() ? *after : *std::prev(after);
    out.population_fallbacks.push_back(iso3 + " " + std::to_string(year) + " -> " + std::to_string(used.first));
    return used.second;
  };

  for (int t = path.first_year - 1; t <= path.last_year; ++t) out.years[t] = {};
  for (const auto& [iso3, cp] : path.countries) {
    if (!scope.empty() && !scope.contains(iso3)) continue;
    out.covered.push_back(iso3);
    for (auto& [t, point] : out.years) {
      const double rate = t < path.first_year ? cp.base_headcount : cp.headcount.at(t);
      const double pop = population_at(iso3, t);
      point.population += pop;
      point.poor_count += pop * rate;
    }
  }
  for (auto& [t, point] : out.years) point.rate = point.population > 0.0 ? point.poor_count / point.population : 0.0;
  return out;
}

}  // namespace povkit
