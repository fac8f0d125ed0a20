#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "povkit/dist_measures.hpp"

using namespace povkit;

namespace {

struct Draw {
  std::vector<double> y, w;
};

Draw random_draw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 200);
  std::lognormal_distribution<double> income(std::log(2.0), 0.8);
  std::uniform_real_distribution<double> weight(0.1, 3.0);
  Draw d;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) {
    d.y.push_back(income(rng));
    d.w.push_back(weight(rng));
  }
  return d;
}

}  // namespace

TEST(Fgt, HandValues) {
  const IncomeSample s({1, 2, 3});
  EXPECT_DOUBLE_EQ(fgt(s, 1.9, 0), 1.0 / 3.0);
  EXPECT_NEAR(fgt(s, 1.9, 1), (0.9 / 1.9) / 3.0, 1e-15);
  EXPECT_NEAR(fgt(s, 1.9, 2), (0.9 / 1.9) * (0.9 / 1.9) / 3.0, 1e-15);
  const IncomeSample rich({2, 3, 4});
  for (int a = 0; a <= 2; ++a) EXPECT_EQ(fgt(rich, 1.9, a), 0.0);
}

TEST(Fgt, PoorMeansStrictlyBelowLine) {
  EXPECT_EQ(headcount(IncomeSample({1.9}), 1.9), 0.0);
  EXPECT_EQ(watts(IncomeSample({1.9}), 1.9), 0.0);
}

TEST(Fgt, Errors) {
  EXPECT_THROW(fgt(IncomeSample({1}), 0.0, 0), Error);
  EXPECT_THROW(fgt(IncomeSample({1}), 1.9, 3), Error);
  EXPECT_THROW(IncomeSample({}), Error);
  EXPECT_THROW(IncomeSample({1, 2}, {1}), Error);
  EXPECT_THROW(IncomeSample({1, -2}), Error);
  EXPECT_THROW(IncomeSample({1, 2}, {1, 0}), Error);
}

TEST(Watts, ClosedForms) {
  const double z = 2.7;
  EXPECT_NEAR(watts(IncomeSample({z / std::exp(1.0), z}), z), 0.5, 1e-15);
  EXPECT_NEAR(watts(IncomeSample({0.5}), 1.9), std::log(3.8), 1e-15);
  try {
    watts(IncomeSample({0.0, 1.0}), 1.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroIncomeAmongPoor);
  }
}

TEST(Gini, Basics) {
  EXPECT_EQ(gini(IncomeSample({3, 3, 3})), 0.0);
  EXPECT_DOUBLE_EQ(gini(IncomeSample({0, 1})), 0.5);
  EXPECT_NEAR(gini(IncomeSample({0, 1}), {.small_sample_correction = true}), 1.0, 1e-15);
  EXPECT_THROW(gini(IncomeSample({0, 0})), Error);
}

TEST(Measures, MatchBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    auto d = random_draw(rng);
    const IncomeSample s(d.y, d.w);
    const double z = 1.9;
    for (int a = 0; a <= 2; ++a) EXPECT_NEAR(fgt(s, z, a), oracle::fgt(d.y, d.w, z, a), 1e-12);
    EXPECT_NEAR(watts(s, z), oracle::watts(d.y, d.w, z), 1e-12);
    EXPECT_NEAR(gini(s), oracle::gini(d.y, d.w), 1e-12);
  }
}

TEST(Measures, Invariances) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = random_draw(rng);
    const IncomeSample s(d.y, d.w);
    const double z = 1.9, c = 3.7;

    auto scaled = d.y;
    for (auto& v : scaled) v *= c;
    const IncomeSample sc(scaled, d.w);
    for (int a = 0; a <= 2; ++a) EXPECT_NEAR(fgt(sc, z * c, a), fgt(s, z, a), 1e-12);
    EXPECT_NEAR(watts(sc, z * c), watts(s, z), 1e-12);
    EXPECT_NEAR(gini(sc), gini(s), 1e-12);

    auto y2 = d.y, w2 = d.w;
    y2.insert(y2.end(), d.y.begin(), d.y.end());
    w2.insert(w2.end(), d.w.begin(), d.w.end());
    const IncomeSample rep2(y2, w2);
    for (int a = 0; a <= 2; ++a) EXPECT_NEAR(fgt(rep2, z, a), fgt(s, z, a), 1e-12);
    EXPECT_NEAR(watts(rep2, z), watts(s, z), 1e-12);
    EXPECT_NEAR(gini(rep2), gini(s), 1e-12);

    const double h = fgt(s, z, 0), g1 = fgt(s, z, 1), g2 = fgt(s, z, 2);
    EXPECT_GE(h, g1);
    EXPECT_GE(g1, g2);
    EXPECT_GE(watts(s, z), g1);
    EXPECT_GE(gini(s), 0.0);
    EXPECT_LT(gini(s), 1.0);
  }
}

TEST(Measures, RaisingAnIncomeNeverRaisesPoverty) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> bump(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = random_draw(rng);
    const IncomeSample before(d.y, d.w);
    auto y = d.y;
    y[rng() % y.size()] += bump(rng);
    const IncomeSample after(y, d.w);
    for (int a = 0; a <= 2; ++a) EXPECT_LE(fgt(after, 1.9, a), fgt(before, 1.9, a) + 1e-15);
    EXPECT_LE(watts(after, 1.9), watts(before, 1.9) + 1e-15);
  }
}

TEST(Lorenz, FromSample) {
  const auto eq = lorenz_from_sample(IncomeSample({4, 4, 4, 4}), 8);
  for (const auto& pt : eq.points()) EXPECT_NEAR(pt.l, pt.p, 1e-15);

  const auto two = lorenz_from_sample(IncomeSample({0, 1}), 2);
  ASSERT_EQ(two.points().size(), 3u);
  EXPECT_EQ(two.points()[1], (LorenzPoint{0.5, 0.0}));
  EXPECT_EQ(two.points()[2], (LorenzPoint{1.0, 1.0}));
}

TEST(Lorenz, InvalidCurves) {
  EXPECT_THROW(LorenzCurve({{0, 0}, {0.5, 0.6}, {1, 1}}), Error);
  EXPECT_THROW(LorenzCurve({{0, 0}, {0.5, 0.4}, {0.6, 0.41}, {1, 1}}), Error);
  EXPECT_THROW(LorenzCurve({{0, 0}, {1, 0.9}}), Error);
  EXPECT_NO_THROW(LorenzCurve({{0, 0}, {0.5, 0.2}, {1, 1}}));
}

TEST(Lorenz, RandomSamplesGiveValidCurves) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = random_draw(rng);
    EXPECT_NO_THROW(lorenz_from_sample(IncomeSample(d.y, d.w), 1 + 1 + rng() % 500));
  }
}

TEST(SampleFromDistribution, SliceArithmetic) {
  const Distribution flat(10.0, LorenzCurve({{0, 0}, {1, 1}}));
  const auto s = sample_from_distribution(flat, 4);
  for (double y : s.incomes()) EXPECT_NEAR(y, 10.0, 1e-12);

  const Distribution two(0.5, lorenz_from_sample(IncomeSample({0, 1}), 2));
  const auto t = sample_from_distribution(two, 2);
  EXPECT_NEAR(t.incomes()[0], 0.0, 1e-15);
  EXPECT_NEAR(t.incomes()[1], 1.0, 1e-15);
}

TEST(SampleFromDistribution, RoundTrip) {
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> income(1.0, 0.7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> y(1 + rng() % 150);
    for (auto& v : y) v = income(rng);
    const IncomeSample s(y);
    const auto back = sample_from_distribution(distribution_from_sample(s, y.size()), y.size());
    std::sort(y.begin(), y.end());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(back.incomes()[i], y[i], 1e-10);
  }
}
