#pragma once

// Growth / redistribution / residual decomposition of a poverty change
// between two distributions, evaluated at a fixed reference period.

#include <optional>
#include <string>
#include <string_view>

#include "povkit/dist_measures.hpp"
#include "povkit/error.hpp"

namespace povkit {

enum class Measure { headcount, gap, gap_sq, watts };
enum class ReferencePeriod { initial, final };

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::headcount: return "headcount";
    case Measure::gap: return "gap";
    case Measure::gap_sq: return "gap_sq";
    case Measure::watts: return "watts";
  }
  return "";
}

inline std::optional<Measure> parse_measure(std::string_view s) {
  if (s == "headcount") return Measure::headcount;
  if (s == "gap" || s == "poverty_gap") return Measure::gap;
  if (s == "gap_sq" || s == "poverty_gap_sq") return Measure::gap_sq;
  if (s == "watts") return Measure::watts;
  return std::nullopt;
}

inline double poverty_measure(const IncomeSample& sample, double z, Measure m) {
  switch (m) {
    case Measure::headcount: return fgt(sample, z, 0);
    case Measure::gap: return fgt(sample, z, 1);
    case Measure::gap_sq: return fgt(sample, z, 2);
    case Measure::watts: return watts(sample, z);
  }
  return 0.0;
}

struct DecompResult {
  Measure measure = Measure::headcount;
  double z = 0.0;
  double total = 0.0;
  double growth = 0.0;
  double redistribution = 0.0;
  double residual = 0.0;
  ReferencePeriod reference = ReferencePeriod::initial;
};

inline constexpr std::size_t kDefaultQuantiles = 10000;

// P(mu, L): the measure on the n-slice materialization of (mu, L).
inline double evaluate_poverty(double mean, const LorenzCurve& lorenz, double z, Measure m,
                               std::size_t n_quantiles) {
  return poverty_measure(sample_from_distribution(Distribution(mean, lorenz), n_quantiles), z, m);
}

inline DecompResult datt_ravallion(const Distribution& initial, const Distribution& final_dist, double z,
                                   Measure measure, std::size_t n_quantiles = kDefaultQuantiles,
                                   ReferencePeriod reference = ReferencePeriod::initial) {
  if (!(z > 0.0)) fail(ErrorKind::NonpositiveLine, std::to_string(z));
  if (n_quantiles < 100) fail(ErrorKind::InvalidArgument, "n_quantiles must be at least 100");
  auto P = [&](const Distribution& mean_from, const Distribution& lorenz_from) {
    return evaluate_poverty(mean_from.mean, lorenz_from.lorenz, z, measure, n_quantiles);
  };
  const double p_ii = P(initial, initial);
  const double p_ff = P(final_dist, final_dist);

  DecompResult r;
  r.measure = measure;
  r.z = z;
  r.reference = reference;
  r.total = p_ff - p_ii;
  if (reference == ReferencePeriod::initial) {
    r.growth = P(final_dist, initial) - p_ii;
    r.redistribution = P(initial, final_dist) - p_ii;
  } else {
    r.growth = p_ff - P(initial, final_dist);
    r.redistribution = p_ff - P(final_dist, initial);
  }
  r.residual = r.total - r.growth - r.redistribution;
  return r;
}

}  // namespace povkit
