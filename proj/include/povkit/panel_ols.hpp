#pragma once

// Linear panel regression with country fixed effects (within estimator),
// optional interaction terms and country-clustered sandwich covariance.
//
// Interaction columns are raw products formed before the within
// transformation. The reported constant is grand_mean(y) - b'grand_mean(x),
// and its standard error comes from the same sandwich applied to the
// within-transformed design with grand means added back plus a unit column.

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "povkit/error.hpp"
#include "povkit/panel_store.hpp"

namespace povkit {

inline constexpr std::string_view kConstantTerm = "(constant)";

enum class Dimension { country };

inline std::optional<Dimension> parse_dimension(std::string_view s) {
  if (s == "country") return Dimension::country;
  return std::nullopt;
}

inline std::string interaction_name(const std::string& a, const std::string& b) { return a + ":" + b; }

struct ModelSpec {
  std::string dependent;
  std::vector<std::string> regressors;
  std::vector<std::pair<std::string, std::string>> interactions;
  Dimension fixed_effect = Dimension::country;
  Dimension cluster = Dimension::country;
  bool include_constant = true;

  // Slope terms in design order: regressors, then interaction products.
  std::vector<std::string> terms() const {
    std::vector<std::string> t = regressors;
    for (const auto& [a, b] : interactions) t.push_back(interaction_name(a, b));
    return t;
  }

  std::vector<std::string> required_fields() const {
    std::vector<std::string> out{dependent};
    auto add = [&](const std::string& s) {
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    for (const auto& r : regressors) add(r);
    for (const auto& [a, b] : interactions) {
      add(a);
      add(b);
    }
    return out;
  }

  void validate() const {
    if (dependent.empty()) fail(ErrorKind::InvalidModelSpec, "no dependent variable");
    const auto t = terms();
    if (t.empty()) fail(ErrorKind::InvalidModelSpec, "no regressors");
    std::set<std::string> seen;
    for (const auto& name : t) {
      if (name == dependent) fail(ErrorKind::InvalidModelSpec, "dependent variable among regressors: " + name);
      if (!seen.insert(name).second) fail(ErrorKind::InvalidModelSpec, "duplicate regressor: " + name);
    }
    for (const auto& [a, b] : interactions) {
      if (a == b) fail(ErrorKind::InvalidModelSpec, "self-interaction " + a);
      if (seen.contains(interaction_name(b, a)))
        fail(ErrorKind::InvalidModelSpec, "interaction listed twice: " + a + ", " + b);
    }
  }
};

// Column-oriented estimation input. `groups` doubles as the fixed-effect and
// the cluster identifier (both are the country).
struct RegressionData {
  std::vector<std::string> groups;
  std::vector<int> years;
  std::map<std::string, std::vector<std::optional<double>>> columns;

  std::size_t size() const { return groups.size(); }
};

inline RegressionData regression_data(const AnalysisPanel& panel, std::span<const std::string> names) {
  RegressionData d;
  for (const auto& n : names) {
    if (n.starts_with("d_"))
      fail(ErrorKind::UnknownField, n + " (differenced variables need differenced rows)");
    Field f = field_or_throw(n);
    auto& col = d.columns[n];
    for (const auto& r : panel.rows()) col.push_back(r[f]);
  }
  for (const auto& r : panel.rows()) {
    d.groups.push_back(r.country.iso3);
    d.years.push_back(r.year);
  }
  return d;
}

inline RegressionData regression_data(std::span<const DiffRow> rows, std::span<const std::string> names) {
  RegressionData d;
  for (const auto& n : names) {
    auto& col = d.columns[n];
    for (const auto& r : rows) col.push_back(r.value(n));
  }
  for (const auto& r : rows) {
    d.groups.push_back(r.country.iso3);
    d.years.push_back(r.year);
  }
  return d;
}

struct DropReport {
  std::size_t rows_in = 0;
  std::size_t rows_used = 0;
  std::map<std::string, std::size_t> missing_by_field;
};

struct RegressionResult {
  ModelSpec spec;
  std::vector<std::string> terms;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd vcov;  // over terms, then the constant when included
  bool has_constant = true;
  double constant = 0.0;
  double constant_se = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;
  std::size_t n_countries = 0;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;  // LSDV convention: country dummies counted as parameters
  double within_r2 = 0.0;
  std::vector<std::string> row_groups;
  std::vector<int> row_years;
  Eigen::VectorXd residuals;
  DropReport dropped;

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i] == name) return i;
    if (has_constant && name == kConstantTerm) return terms.size();
    return std::nullopt;
  }

  double coef(std::string_view name) const {
    auto i = index_of(name);
    if (!i) fail(ErrorKind::MissingCoefficient, std::string(name));
    return *i == terms.size() ? constant : coefficients(static_cast<Eigen::Index>(*i));
  }

  double se(std::string_view name) const {
    auto i = index_of(name);
    if (!i) fail(ErrorKind::MissingCoefficient, std::string(name));
    const auto k = static_cast<Eigen::Index>(*i);
    return std::sqrt(vcov(k, k));
  }
};

// Builds a result from reported estimates only (diagonal covariance); used
// for fixtures typed in from a table and for models read back from CSV.
inline RegressionResult reported_result(ModelSpec spec, std::span<const double> estimates,
                                        std::span<const double> ses, std::optional<std::pair<double, double>> constant,
                                        std::size_t n_obs, double adjusted_r2, std::size_t n_countries,
                                        std::size_t n_clusters) {
  RegressionResult r;
  r.terms = spec.terms();
  if (estimates.size() != r.terms.size() || ses.size() != r.terms.size())
    fail(ErrorKind::InvalidModelSpec, "estimate count does not match the model terms");
  r.spec = std::move(spec);
  const auto k = static_cast<Eigen::Index>(r.terms.size());
  r.coefficients = Eigen::Map<const Eigen::VectorXd>(estimates.data(), k);
  r.has_constant = constant.has_value();
  r.spec.include_constant = r.has_constant;
  r.vcov = Eigen::MatrixXd::Zero(k + (r.has_constant ? 1 : 0), k + (r.has_constant ? 1 : 0));
  for (Eigen::Index i = 0; i < k; ++i) r.vcov(i, i) = ses[static_cast<std::size_t>(i)] * ses[static_cast<std::size_t>(i)];
  if (constant) {
    r.constant = constant->first;
    r.constant_se = constant->second;
    r.vcov(k, k) = constant->second * constant->second;
  }
  r.n_obs = n_obs;
  r.adjusted_r2 = adjusted_r2;
  r.n_countries = n_countries;
  r.n_clusters = n_clusters;
  return r;
}

struct ClusterOptions {
  // c = G/(G-1) * (N-1)/(N-K)
  bool small_sample_correction = true;
};

// Sandwich covariance c (X'X)^-1 (sum_g X_g' u_g u_g' X_g) (X'X)^-1.
// `clusters` holds one arbitrary id per row; `k_params` is the K of the
// small-sample factor.
inline Eigen::MatrixXd cluster_vcov(const Eigen::MatrixXd& x, const Eigen::VectorXd& resid,
                                    std::span<const std::size_t> clusters, std::size_t k_params,
                                    ClusterOptions opts = {}) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (resid.size() != x.rows() || clusters.size() != n)
    fail(ErrorKind::InvalidArgument, "design, residuals and clusters differ in length");
  std::map<std::size_t, Eigen::VectorXd> scores;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::VectorXd s = x.row(row).transpose() * resid(row);
    auto [it, inserted] = scores.try_emplace(clusters[i], s);
    if (!inserted) it->second += s;
  }
  const std::size_t g = scores.size();
  if (g < 2) fail(ErrorKind::TooFewClusters, std::to_string(g) + " cluster(s)");
  if (n <= k_params) fail(ErrorKind::InsufficientRows, "no residual degrees of freedom");

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  for (const auto& [id, s] : scores) meat.noalias() += s * s.transpose();

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::MatrixXd bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
  double c = 1.0;
  if (opts.small_sample_correction) {
    const double gd = static_cast<double>(g), nd = static_cast<double>(n), kd = static_cast<double>(k_params);
    c = gd / (gd - 1.0) * (nd - 1.0) / (nd - kd);
  }
  Eigen::MatrixXd v = c * bread * meat * bread;
  return 0.5 * (v + v.transpose());
}

struct FitOptions {
  ClusterOptions cluster;
};

inline RegressionResult fit_fe_ols(const RegressionData& data, const ModelSpec& spec, FitOptions opts = {}) {
  spec.validate();
  const auto required = spec.required_fields();
  for (const auto& f : required)
    if (!data.columns.contains(f)) fail(ErrorKind::UnknownField, f);

  RegressionResult r;
  r.spec = spec;
  r.terms = spec.terms();
  r.has_constant = spec.include_constant;
  r.dropped.rows_in = data.size();

  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < data.size(); ++i) {
    bool ok = true;
    for (const auto& f : required) {
      if (!data.columns.at(f)[i]) {
        ++r.dropped.missing_by_field[f];
        ok = false;
      }
    }
    if (ok) used.push_back(i);
  }
  r.dropped.rows_used = used.size();
  const auto n = static_cast<Eigen::Index>(used.size());
  if (n == 0) fail(ErrorKind::NoObservations, "no rows with all of the model's variables");

  const auto k = static_cast<Eigen::Index>(r.terms.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, k);
  std::vector<std::size_t> group(used.size());
  std::map<std::string, std::size_t> group_ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t src = used[static_cast<std::size_t>(i)];
    y(i) = *data.columns.at(spec.dependent)[src];
    Eigen::Index j = 0;
    for (const auto& reg : spec.regressors) x(i, j++) = *data.columns.at(reg)[src];
    for (const auto& [a, b] : spec.interactions)
      x(i, j++) = *data.columns.at(a)[src] * *data.columns.at(b)[src];
    group[static_cast<std::size_t>(i)] = group_ids.try_emplace(data.groups[src], group_ids.size()).first->second;
    r.row_groups.push_back(data.groups[src]);
    r.row_years.push_back(data.years[src]);
  }
  const std::size_t n_groups = group_ids.size();
  r.n_obs = used.size();
  r.n_countries = n_groups;
  r.n_clusters = n_groups;
  if (n_groups < 2) fail(ErrorKind::TooFewClusters, std::to_string(n_groups) + " cluster(s)");

  // Within transformation.
  Eigen::MatrixXd group_mean_x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_groups), k);
  Eigen::VectorXd group_mean_y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_groups));
  std::vector<double> group_n(n_groups, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<Eigen::Index>(group[static_cast<std::size_t>(i)]);
    group_mean_x.row(g) += x.row(i);
    group_mean_y(g) += y(i);
    group_n[static_cast<std::size_t>(g)] += 1.0;
  }
  for (std::size_t g = 0; g < n_groups; ++g) {
    group_mean_x.row(static_cast<Eigen::Index>(g)) /= group_n[g];
    group_mean_y(static_cast<Eigen::Index>(g)) /= group_n[g];
  }
  Eigen::MatrixXd xw(n, k);
  Eigen::VectorXd yw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<Eigen::Index>(group[static_cast<std::size_t>(i)]);
    xw.row(i) = x.row(i) - group_mean_x.row(g);
    yw(i) = y(i) - group_mean_y(g);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
  if (qr.rank() < k) {
    std::string cols;
    for (Eigen::Index j = qr.rank(); j < k; ++j) {
      if (!cols.empty()) cols += ", ";
      cols += r.terms[static_cast<std::size_t>(qr.colsPermutation().indices()(j))];
    }
    fail(ErrorKind::RankDeficient, "collinear after removing country means: " + cols);
  }
  r.coefficients = qr.solve(yw);
  r.residuals = yw - xw * r.coefficients;

  const Eigen::RowVectorXd grand_x = x.colwise().mean();
  const double grand_y = y.mean();
  std::size_t k_params = static_cast<std::size_t>(k);
  Eigen::MatrixXd design = xw;
  if (spec.include_constant) {
    design.resize(n, k + 1);
    design.leftCols(k) = xw.rowwise() + grand_x;
    design.col(k).setOnes();
    ++k_params;
    r.constant = grand_y - grand_x.dot(r.coefficients);
  }
  r.vcov = cluster_vcov(design, r.residuals, group, k_params, opts.cluster);
  if (spec.include_constant) r.constant_se = std::sqrt(r.vcov(k, k));

  const double ssr = r.residuals.squaredNorm();
  const double tss = (y.array() - grand_y).matrix().squaredNorm();
  const double within_tss = yw.squaredNorm();
  const double nd = static_cast<double>(n);
  r.r2 = tss > 0.0 ? 1.0 - ssr / tss : std::numeric_limits<double>::quiet_NaN();
  const double df = nd - static_cast<double>(k) - static_cast<double>(n_groups);
  r.adjusted_r2 = df > 0.0 ? 1.0 - (1.0 - r.r2) * (nd - 1.0) / df : std::numeric_limits<double>::quiet_NaN();
  r.within_r2 = within_tss > 0.0 ? 1.0 - ssr / within_tss : std::numeric_limits<double>::quiet_NaN();
  return r;
}

// ---------------------------------------------------------------------------
// Inference helpers

struct MarginalEffect {
  double estimate = 0.0;
  double se = 0.0;
};

// d E[y] / d `of`, holding every interaction partner of `of` at `at`.
inline MarginalEffect marginal_effect(const RegressionResult& r, const std::string& of,
                                      const std::map<std::string, double>& at) {
  auto base = r.index_of(of);
  if (!base || *base >= r.terms.size()) fail(ErrorKind::InvalidArgument, of + " is not a regressor");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(r.vcov.rows());
  grad(static_cast<Eigen::Index>(*base)) = 1.0;
  for (const auto& [a, b] : r.spec.interactions) {
    if (a != of && b != of) continue;
    const std::string& partner = a == of ? b : a;
    auto value = at.find(partner);
    if (value == at.end()) fail(ErrorKind::MissingModeratorValue, partner);
    auto idx = r.index_of(interaction_name(a, b));
    grad(static_cast<Eigen::Index>(*idx)) += value->second;
  }
  MarginalEffect me;
  me.estimate = grad.head(r.coefficients.size()).dot(r.coefficients);
  me.se = std::sqrt(std::max(0.0, grad.dot(r.vcov * grad)));
  return me;
}

enum class Stars { none, one, two, three };

inline std::string_view to_string(Stars s) {
  switch (s) {
    case Stars::none: return "";
    case Stars::one: return "*";
    case Stars::two: return "**";
    case Stars::three: return "***";
  }
  return "";
}

// Two-sided p-value with G - 1 degrees of freedom.
inline double cluster_p_value(double estimate, double se, std::size_t n_clusters) {
  if (!(se > 0.0)) fail(ErrorKind::InvalidArgument, "standard error must be positive");
  if (n_clusters < 2) fail(ErrorKind::TooFewClusters, std::to_string(n_clusters) + " cluster(s)");
  const double t = std::abs(estimate / se);
  boost::math::students_t dist(static_cast<double>(n_clusters - 1));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

inline Stars significance_stars(double estimate, double se, std::size_t n_clusters) {
  const double p = cluster_p_value(estimate, se, n_clusters);
  if (p < 0.01) return Stars::three;
  if (p < 0.05) return Stars::two;
  if (p < 0.10) return Stars::one;
  return Stars::none;
}

}  // namespace povkit
