#pragma once

// Poverty and inequality measures on (optionally weighted) income samples,
// and the conversions between samples and piecewise-linear Lorenz curves.
//
// A person is poor when income is strictly below the line z; incomes exactly
// at z count as non-poor. The Gini coefficient is the relative mean absolute
// difference halved, with no n/(n-1) small-sample correction unless asked.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "povkit/error.hpp"

namespace povkit {

class IncomeSample {
 public:
  // `weights` may be empty for an equally weighted sample.
  explicit IncomeSample(std::vector<double> incomes, std::vector<double> weights = {})
      : incomes_(std::move(incomes)), weights_(std::move(weights)) {
    if (incomes_.empty()) fail(ErrorKind::InvalidSample, "empty income sample");
    if (!weights_.empty() && weights_.size() != incomes_.size())
      fail(ErrorKind::InvalidSample, "weights and incomes differ in length");
    for (double y : incomes_)
      if (!std::isfinite(y) || y < 0.0) fail(ErrorKind::InvalidSample, "negative or non-finite income");
    for (double w : weights_)
      if (!std::isfinite(w) || w <= 0.0) fail(ErrorKind::InvalidSample, "weights must be positive");
  }

  std::span<const double> incomes() const { return incomes_; }
  std::span<const double> weights() const { return weights_; }
  bool weighted() const { return !weights_.empty(); }
  std::size_t size() const { return incomes_.size(); }
  double weight(std::size_t i) const { return weights_.empty() ? 1.0 : weights_[i]; }

  double total_weight() const {
    return weights_.empty() ? static_cast<double>(incomes_.size())
                            : std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < incomes_.size(); ++i) s += weight(i) * incomes_[i];
    return s / total_weight();
  }

 private:
  std::vector<double> incomes_;
  std::vector<double> weights_;
};

// Foster-Greer-Thorbecke family: alpha 0 headcount, 1 poverty gap,
// 2 squared poverty gap.
inline double fgt(const IncomeSample& sample, double z, int alpha) {
  if (!(z > 0.0)) fail(ErrorKind::NonpositiveLine, std::to_string(z));
  if (alpha < 0 || alpha > 2) fail(ErrorKind::InvalidArgument, "alpha must be 0, 1 or 2");
  const auto y = sample.incomes();
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] < z)) continue;
    const double gap = (z - y[i]) / z;
    const double term = alpha == 0 ? 1.0 : alpha == 1 ? gap : gap * gap;
    acc += sample.weight(i) * term;
  }
  return acc / sample.total_weight();
}

inline double headcount(const IncomeSample& s, double z) { return fgt(s, z, 0); }
inline double poverty_gap(const IncomeSample& s, double z) { return fgt(s, z, 1); }
inline double poverty_gap_sq(const IncomeSample& s, double z) { return fgt(s, z, 2); }

inline double watts(const IncomeSample& sample, double z) {
  if (!(z > 0.0)) fail(ErrorKind::NonpositiveLine, std::to_string(z));
  const auto y = sample.incomes();
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] < z)) continue;
    if (y[i] <= 0.0) fail(ErrorKind::ZeroIncomeAmongPoor, "Watts index undefined at zero income");
    acc += sample.weight(i) * std::log(z / y[i]);
  }
  return acc / sample.total_weight();
}

struct GiniOptions {
  bool small_sample_correction = false;  // multiply by n/(n-1)
};

// O(n log n): sorted pairwise sum
//   sum_{i,j} w_i w_j |y_i - y_j| = 2 sum_k w_k y_k (C_{k-1} - (W - C_k))
// with C_k the cumulative weight through sorted position k.
inline double gini(const IncomeSample& sample, GiniOptions opts = {}) {
  const double mu = sample.mean();
  if (!(mu > 0.0)) fail(ErrorKind::ZeroMean, "Gini undefined for zero mean income");
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto y = sample.incomes();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  const double total = sample.total_weight();
  double below = 0.0;
  double acc = 0.0;
  for (std::size_t idx : order) {
    const double w = sample.weight(idx);
    const double above = total - below - w;
    acc += w * y[idx] * (below - above);
    below += w;
  }
  double g = 2.0 * acc / (2.0 * total * total * mu);
  if (opts.small_sample_correction && sample.size() > 1) {
    const double n = static_cast<double>(sample.size());
    g *= n / (n - 1.0);
  }
  return std::max(g, 0.0);
}

// ---------------------------------------------------------------------------
// Lorenz curves

struct LorenzPoint {
  double p = 0.0;  // cumulative population share
  double l = 0.0;  // cumulative income share

  friend bool operator==(const LorenzPoint&, const LorenzPoint&) = default;
};

class LorenzCurve {
 public:
  static constexpr double kTolerance = 1e-9;

  explicit LorenzCurve(std::vector<LorenzPoint> points) : points_(std::move(points)) {
    if (points_.size() < 2) fail(ErrorKind::InvalidLorenz, "need at least two points");
    const auto& first = points_.front();
    const auto& last = points_.back();
    if (first.p != 0.0 || first.l != 0.0) fail(ErrorKind::InvalidLorenz, "must start at (0,0)");
    if (last.p != 1.0 || last.l != 1.0) fail(ErrorKind::InvalidLorenz, "must end at (1,1)");
    double prev_slope = -1.0;
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const auto& a = points_[i - 1];
      const auto& b = points_[i];
      if (!(b.p > a.p)) fail(ErrorKind::InvalidLorenz, "p must be strictly ascending");
      if (b.l < a.l - kTolerance) fail(ErrorKind::InvalidLorenz, "L must be nondecreasing");
      if (b.l > b.p + kTolerance || b.l < -kTolerance)
        fail(ErrorKind::InvalidLorenz, "L(p) must lie in [0, p]");
      const double slope = (b.l - a.l) / (b.p - a.p);
      if (slope < prev_slope - kTolerance * std::max(1.0, std::abs(slope)))
        fail(ErrorKind::InvalidLorenz, "curve must be convex");
      prev_slope = slope;
    }
  }

  std::span<const LorenzPoint> points() const { return points_; }

  // Linear interpolation between grid points.
  double value_at(double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    auto it = std::upper_bound(points_.begin(), points_.end(), p,
                               [](double v, const LorenzPoint& pt) { return v < pt.p; });
    const auto& b = *it;
    const auto& a = *std::prev(it);
    const double t = (p - a.p) / (b.p - a.p);
    return a.l + t * (b.l - a.l);
  }

  friend bool operator==(const LorenzCurve&, const LorenzCurve&) = default;

 private:
  std::vector<LorenzPoint> points_;
};

struct Distribution {
  double mean = 0.0;
  LorenzCurve lorenz;

  Distribution(double mu, LorenzCurve curve) : mean(mu), lorenz(std::move(curve)) {
    if (!(mean > 0.0)) fail(ErrorKind::ZeroMean, "distribution mean must be positive");
  }
};

// Exact cumulative shares at p = k / grid_size; an observation straddling a
// grid point contributes linearly to each side.
inline LorenzCurve lorenz_from_sample(const IncomeSample& sample, std::size_t grid_size) {
  if (grid_size < 2) fail(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  const auto y = sample.incomes();
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });

  const double total_w = sample.total_weight();
  double total_income = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total_income += sample.weight(i) * y[i];
  if (!(total_income > 0.0)) fail(ErrorKind::ZeroMean, "Lorenz curve undefined for zero mean income");

  std::vector<LorenzPoint> pts;
  pts.reserve(grid_size + 1);
  pts.push_back({0.0, 0.0});
  std::size_t k = 0;
  double cum_w = 0.0;
  double cum_income = 0.0;
  for (std::size_t j = 1; j < grid_size; ++j) {
    const double p = static_cast<double>(j) / static_cast<double>(grid_size);
    const double target = p * total_w;
    while (k < order.size() && cum_w + sample.weight(order[k]) <= target) {
      cum_w += sample.weight(order[k]);
      cum_income += sample.weight(order[k]) * y[order[k]];
      ++k;
    }
    double share = cum_income;
    if (k < order.size()) share += (target - cum_w) * y[order[k]];
    pts.push_back({p, std::clamp(share / total_income, 0.0, p)});
  }
  pts.push_back({1.0, 1.0});
  return LorenzCurve(std::move(pts));
}

inline Distribution distribution_from_sample(const IncomeSample& sample, std::size_t grid_size = 1000) {
  return Distribution(sample.mean(), lorenz_from_sample(sample, grid_size));
}

// n equally weighted incomes whose k-th slice holds the income share
// L(k/n) - L((k-1)/n) of a population with mean dist.mean.
inline IncomeSample sample_from_distribution(const Distribution& dist, std::size_t n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "n must be at least 1");
  std::vector<double> incomes(n);
  const double scale = dist.mean * static_cast<double>(n);
  double prev = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double cur = dist.lorenz.value_at(static_cast<double>(k) / static_cast<double>(n));
    incomes[k - 1] = std::max(0.0, scale * (cur - prev));
    prev = cur;
  }
  return IncomeSample(std::move(incomes));
}

}  // namespace povkit
