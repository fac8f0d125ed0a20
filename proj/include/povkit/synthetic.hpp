#pragma once

// Synthetic country-year data in the six input schemas. Incomes are
// lognormal per country-year; poverty and inequality columns are computed
// from a quantile grid of that distribution, so the measure columns are
// mutually consistent. Deterministic for a given seed.

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "povkit/csv.hpp"
#include "povkit/dist_measures.hpp"
#include "povkit/panel_store.hpp"

namespace povkit {

struct SyntheticOptions {
  std::uint64_t seed = 42;
  int n_countries = 48;
  int first_year = 2004;
  int last_year = 2018;
  int forecast_last_year = 2021;
  double poverty_line = 1.90;
  std::size_t quantiles = 400;
};

struct SyntheticData {
  std::string fas, povcal, weo, findex, population, income_class;
  std::string sample_initial, sample_final;
};

namespace detail {

inline std::string country_code(int i) {
  std::string s = "X";
  s.push_back(static_cast<char>('A' + (i / 26) % 26));
  s.push_back(static_cast<char>('A' + i % 26));
  return s;
}

inline IncomeLevel synthetic_level(int i) {
  switch (i % 10) {
    case 0: case 1: case 2: case 3: return IncomeLevel::low;
    case 4: case 5: case 6: case 7: return IncomeLevel::lower_middle;
    case 8: return IncomeLevel::upper_middle;
    default: return IncomeLevel::high;
  }
}

inline IncomeSample lognormal_grid(double log_mean, double sigma, std::size_t n) {
  static const boost::math::normal_distribution<double> std_normal;
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    y[k] = std::exp(log_mean + sigma * boost::math::quantile(std_normal, u));
  }
  return IncomeSample(std::move(y));
}

inline std::string fmt6(double v) { return csv::format_fixed(v, 6); }

}  // namespace detail

inline SyntheticData generate_synthetic(const SyntheticOptions& o = {}) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SyntheticData d;
  d.fas = "iso3,country_name,year,branches_per_100k,atms_per_100k,branches_per_1000km2,atms_per_1000km2,accounts_per_1000\n";
  d.povcal = "iso3,year,headcount,poverty_gap,poverty_gap_sq,watts,gini\n";
  d.weo = "iso3,year,gdp_growth,is_forecast\n";
  d.findex = "iso3,year,account_all,account_male,account_female\n";
  d.population = "iso3,year,population\n";
  d.income_class = "iso3,income_level\n";

  for (int c = 0; c < o.n_countries; ++c) {
    const std::string iso3 = detail::country_code(c);
    const IncomeLevel level = detail::synthetic_level(c);
    d.income_class += iso3 + "," + std::string(to_string(level)) + "\n";

    const double level_rank = static_cast<double>(static_cast<int>(level));
    double log_mean = std::log(1.6 + 2.2 * level_rank + 1.5 * level_rank * level_rank) + 0.25 * normal(rng);
    double sigma = 0.45 + 0.3 * uniform(rng);
    double inclusion = -1.6 + 0.7 * level_rank + 0.3 * normal(rng);
    const double growth_mean = 0.015 + 0.05 * uniform(rng);
    const double pop_growth = 0.005 + 0.025 * uniform(rng);
    double pop = std::exp(std::log(1e6) + 4.5 * uniform(rng));
    const double area_density = std::exp(normal(rng));
    const std::string name = "Country " + iso3.substr(1);

    // One country has a single survey year; others miss some years.
    const double survey_prob = 0.55 + 0.4 * uniform(rng);
    const bool single_survey = c == 5;
    const int single_year = o.first_year + 7;
    bool any_survey = false;

    for (int year = o.first_year; year <= o.forecast_last_year; ++year) {
      const bool forecast = year > o.last_year + 1;
      double g = growth_mean + 0.025 * normal(rng);
      if (year == o.last_year + 2) g -= 0.06 + 0.03 * uniform(rng);
      if (year == o.last_year + 3) g += 0.02;
      d.weo += iso3 + "," + std::to_string(year) + "," + detail::fmt6(g) + "," + (forecast ? "1" : "0") + "\n";
      if (year <= o.last_year + 1) {
        d.population += iso3 + "," + std::to_string(year) + "," + csv::format_fixed(std::round(pop), 0) + "\n";
        pop *= 1.0 + pop_growth;
      }
      if (year > o.last_year) continue;

      const double d_inclusion = 0.08 + 0.05 * normal(rng);
      inclusion += d_inclusion;
      // Inequality drifts; inclusion slightly dampens it.
      sigma = std::clamp(sigma + 0.02 * normal(rng) - 0.03 * d_inclusion, 0.3, 1.1);
      log_mean += 0.9 * g + 0.015 * normal(rng);

      const double scale = std::exp(inclusion);
      auto indicator = [&](double base, double loading) {
        return base * std::pow(scale, loading) * std::exp(0.12 * normal(rng));
      };
      const double br100k = indicator(9.0, 0.9);
      const double atm100k = indicator(18.0, 1.3);
      const double br1000 = indicator(6.0, 0.9) * area_density;
      const double atm1000 = indicator(12.0, 1.3) * area_density;
      const double accounts = indicator(450.0, 1.0);
      if (!(c == 3 && year == o.first_year)) {
        d.fas += csv::join({iso3, name, std::to_string(year), detail::fmt6(br100k), detail::fmt6(atm100k),
                            detail::fmt6(br1000), detail::fmt6(atm1000), detail::fmt6(accounts)}) +
                 "\n";
      }

      if (year == 2011 || year == 2014 || year == 2017) {
        const double share = 1.0 / (1.0 + std::exp(-(inclusion + 0.3)));
        d.findex += iso3 + "," + std::to_string(year) + "," + detail::fmt6(share) + "," +
                    detail::fmt6(std::min(1.0, share * 1.08)) + "," + detail::fmt6(share * 0.92) + "\n";
      }

      const bool surveyed = single_survey ? year == single_year : uniform(rng) < survey_prob;
      if (!surveyed) continue;
      any_survey = true;
      const auto grid = detail::lognormal_grid(log_mean, sigma, o.quantiles);
      const double z = o.poverty_line;
      d.povcal += csv::join({iso3, std::to_string(year), detail::fmt6(fgt(grid, z, 0)), detail::fmt6(fgt(grid, z, 1)),
                             detail::fmt6(fgt(grid, z, 2)), detail::fmt6(watts(grid, z)), detail::fmt6(gini(grid))}) +
                  "\n";
    }
    (void)any_survey;
  }

  auto sample_csv = [&](double log_mean, double sigma) {
    std::string out = "income,weight\n";
    for (int i = 0; i < 250; ++i) {
      const double y = std::exp(log_mean + sigma * normal(rng));
      const double w = 0.5 + uniform(rng);
      out += detail::fmt6(y) + "," + detail::fmt6(w) + "\n";
    }
    return out;
  };
  d.sample_initial = sample_csv(std::log(2.6), 0.6);
  d.sample_final = sample_csv(std::log(3.0), 0.7);
  return d;
}

}  // namespace povkit
