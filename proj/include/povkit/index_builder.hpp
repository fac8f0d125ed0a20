#pragma once

// Composite financial-inclusion index:
//   1. each raw indicator is winsorized at its pooled 95th percentile and
//      min-max normalized over all country-years jointly;
//   2. outreach = first principal component (correlation matrix) of the four
//      branch/ATM penetration indicators;
//   3. usage = normalized deposit accounts per 1,000 adults;
//   4. fii = first principal component of {outreach, usage};
// and each of the three series is finally rescaled onto [0, 1].

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "povkit/error.hpp"
#include "povkit/panel_store.hpp"

namespace povkit {

// Linear interpolation between order statistics: h = (n - 1) p.
inline double quantile_linear(std::span<const double> values, double p) {
  if (values.empty()) fail(ErrorKind::InsufficientRows, "quantile of empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline std::vector<double> winsorize_upper(std::span<const double> values, double pct = 0.95) {
  if (!(pct > 0.0 && pct < 1.0)) fail(ErrorKind::InvalidArgument, "winsorization percentile must be in (0,1)");
  const double cap = quantile_linear(values, pct);
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v = std::min(v, cap);
  return out;
}

inline std::vector<double> minmax_normalize(std::span<const double> values, std::string_view name = "values") {
  if (values.empty()) fail(ErrorKind::InsufficientRows, std::string(name));
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo, max = *hi;
  if (!(max > min)) fail(ErrorKind::DegenerateColumn, std::string(name) + " is constant");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - min) / (max - min);
  return out;
}

struct IndicatorMatrix {
  std::vector<CountryYear> keys;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // keys.size() x columns.size(), complete cases only
};

struct PcaResult {
  std::vector<std::string> columns;
  Eigen::VectorXd weights;      // unit norm, sum > 0
  double eigenvalue = 0.0;      // leading eigenvalue of the correlation matrix
  double variance_share = 0.0;  // eigenvalue / number of columns
  Eigen::VectorXd eigenvalues;  // all, descending
  std::optional<std::string> warning;
};

inline Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x, std::span<const std::string> names) {
  Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double norm = z.col(j).norm();
    if (x.col(j).maxCoeff() == x.col(j).minCoeff() || !(norm > 0.0))
      fail(ErrorKind::DegenerateColumn, names[static_cast<std::size_t>(j)] + " has zero variance");
    z.col(j) /= norm;
  }
  Eigen::MatrixXd c = z.transpose() * z;
  c.diagonal().setOnes();
  return c;
}

inline PcaResult pca_first_component(const IndicatorMatrix& m) {
  if (m.values.rows() < 2) fail(ErrorKind::InsufficientRows, "PCA needs at least 2 rows");
  if (m.values.cols() < 2) fail(ErrorKind::InsufficientRows, "PCA needs at least 2 columns");
  if (static_cast<std::size_t>(m.values.cols()) != m.columns.size() ||
      static_cast<std::size_t>(m.values.rows()) != m.keys.size())
    fail(ErrorKind::InvalidArgument, "indicator matrix shape does not match its labels");
  if (!m.values.allFinite()) fail(ErrorKind::InvalidArgument, "indicator matrix has non-finite cells");

  const Eigen::MatrixXd corr = correlation_matrix(m.values, m.columns);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
  if (solver.info() != Eigen::Success) fail(ErrorKind::ConvergenceFailure, "eigen decomposition did not converge");

  const Eigen::Index p = corr.rows();
  PcaResult r;
  r.columns = m.columns;
  r.eigenvalues = solver.eigenvalues().reverse();
  r.eigenvalue = r.eigenvalues(0);
  r.variance_share = r.eigenvalue / static_cast<double>(p);
  r.weights = solver.eigenvectors().col(p - 1).normalized();
  double sum = r.weights.sum();
  if (sum == 0.0) {
    for (Eigen::Index i = 0; i < p; ++i)
      if (r.weights(i) != 0.0) {
        sum = r.weights(i);
        break;
      }
  }
  if (sum < 0.0) r.weights = -r.weights;
  if (r.weights.minCoeff() < 0.0)
    r.warning = "leading component has mixed-sign loadings";
  return r;
}

enum class IndexKind { fii, outreach, usage };

inline std::string_view to_string(IndexKind k) {
  switch (k) {
    case IndexKind::fii: return "fii";
    case IndexKind::outreach: return "outreach";
    case IndexKind::usage: return "usage";
  }
  return "";
}

struct IndexSeries {
  IndexKind kind = IndexKind::fii;
  std::map<CountryYear, double> values;
};

struct DroppedKey {
  CountryYear key;
  std::string stage;
  std::string reason;
};

struct IndexOptions {
  double winsor_pct = 0.95;
};

struct IndexBuildResult {
  IndexSeries fii{IndexKind::fii, {}};
  IndexSeries outreach{IndexKind::outreach, {}};
  IndexSeries usage{IndexKind::usage, {}};
  PcaResult outreach_pca;
  PcaResult fii_pca;
  std::vector<DroppedKey> dropped;
  std::vector<std::string> warnings;
};

inline constexpr std::array<Field, 4> kOutreachIndicators = {
    Field::branches_per_100k, Field::atms_per_100k, Field::branches_per_1000km2, Field::atms_per_1000km2};

namespace detail {

inline std::vector<double> rescale_scores(const Eigen::VectorXd& scores, std::string_view name) {
  return minmax_normalize(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), name);
}

inline std::vector<double> winsorize_normalize(std::vector<double> column, double pct, std::string_view name) {
  return minmax_normalize(winsorize_upper(column, pct), name);
}

}  // namespace detail

inline IndexBuildResult build_indices(const AnalysisPanel& fas, IndexOptions opts = {}) {
  IndexBuildResult out;

  // Stage 1: outreach over complete cases of Fo1..Fo4.
  std::vector<CountryYear> outreach_keys;
  std::vector<std::vector<double>> raw(kOutreachIndicators.size());
  std::vector<CountryYear> usage_keys;
  std::vector<double> accounts;
  for (const auto& row : fas.rows()) {
    CountryYear key{row.country.iso3, row.year};
    bool complete = true;
    for (auto f : kOutreachIndicators) complete = complete && row[f].has_value();
    if (complete) {
      outreach_keys.push_back(key);
      for (std::size_t j = 0; j < kOutreachIndicators.size(); ++j) raw[j].push_back(*row[kOutreachIndicators[j]]);
    } else {
      out.dropped.push_back({key, "outreach", "missing branch/ATM indicator"});
    }
    if (row[Field::accounts_per_1000]) {
      usage_keys.push_back(key);
      accounts.push_back(*row[Field::accounts_per_1000]);
    } else {
      out.dropped.push_back({key, "usage", "missing accounts_per_1000"});
    }
  }
  if (outreach_keys.size() < 2) fail(ErrorKind::InsufficientRows, "fewer than 2 complete outreach rows");
  if (usage_keys.size() < 2) fail(ErrorKind::InsufficientRows, "fewer than 2 usage rows");

  IndicatorMatrix stage1;
  stage1.keys = outreach_keys;
  stage1.values.resize(static_cast<Eigen::Index>(outreach_keys.size()), static_cast<Eigen::Index>(raw.size()));
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const auto name = std::string(field_name(kOutreachIndicators[j]));
    stage1.columns.push_back(name);
    auto norm = detail::winsorize_normalize(raw[j], opts.winsor_pct, name);
    for (std::size_t i = 0; i < norm.size(); ++i)
      stage1.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = norm[i];
  }
  out.outreach_pca = pca_first_component(stage1);
  if (out.outreach_pca.warning) out.warnings.push_back("outreach: " + *out.outreach_pca.warning);
  const Eigen::VectorXd outreach_scores = stage1.values * out.outreach_pca.weights;
  const auto outreach = detail::rescale_scores(outreach_scores, "outreach");
  for (std::size_t i = 0; i < outreach_keys.size(); ++i) out.outreach.values[outreach_keys[i]] = outreach[i];

  const auto usage = detail::winsorize_normalize(accounts, opts.winsor_pct, "accounts_per_1000");
  for (std::size_t i = 0; i < usage_keys.size(); ++i) out.usage.values[usage_keys[i]] = usage[i];

  // Stage 2: FII over keys carrying both dimensions.
  IndicatorMatrix stage2;
  stage2.columns = {"outreach", "usage"};
  for (const auto& [key, v] : out.outreach.values)
    if (out.usage.values.contains(key)) stage2.keys.push_back(key);
  for (const auto& [key, v] : out.outreach.values)
    if (!out.usage.values.contains(key)) out.dropped.push_back({key, "fii", "no usage value"});
  for (const auto& [key, v] : out.usage.values)
    if (!out.outreach.values.contains(key)) out.dropped.push_back({key, "fii", "no outreach value"});
  if (stage2.keys.size() < 2) fail(ErrorKind::InsufficientRows, "fewer than 2 rows with outreach and usage");
  stage2.values.resize(static_cast<Eigen::Index>(stage2.keys.size()), 2);
  for (std::size_t i = 0; i < stage2.keys.size(); ++i) {
    stage2.values(static_cast<Eigen::Index>(i), 0) = out.outreach.values.at(stage2.keys[i]);
    stage2.values(static_cast<Eigen::Index>(i), 1) = out.usage.values.at(stage2.keys[i]);
  }
  out.fii_pca = pca_first_component(stage2);
  if (out.fii_pca.warning) out.warnings.push_back("fii: " + *out.fii_pca.warning);
  const Eigen::VectorXd fii_scores = stage2.values * out.fii_pca.weights;
  const auto fii = detail::rescale_scores(fii_scores, "fii");
  for (std::size_t i = 0; i < stage2.keys.size(); ++i) out.fii.values[stage2.keys[i]] = fii[i];

  std::sort(out.dropped.begin(), out.dropped.end(), [](const DroppedKey& a, const DroppedKey& b) {
    return std::tie(a.stage, a.key) < std::tie(b.stage, b.key);
  });
  return out;
}

// Writes the three series into the panel's fii/outreach/usage fields.
inline AnalysisPanel attach_indices(const AnalysisPanel& panel, const IndexBuildResult& idx) {
  std::vector<PanelRow> rows = panel.rows();
  for (auto& r : rows) {
    CountryYear key{r.country.iso3, r.year};
    auto put = [&](const IndexSeries& s, Field f) {
      if (auto it = s.values.find(key); it != s.values.end()) r[f] = it->second;
    };
    put(idx.fii, Field::fii);
    put(idx.outreach, Field::outreach);
    put(idx.usage, Field::usage);
  }
  return AnalysisPanel::from_rows(std::move(rows), panel.income_levels(), panel.names());
}

}  // namespace povkit
