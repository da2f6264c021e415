#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace qprop;
using namespace qprop::bounds;

TEST(GeneralBound, ZeroNoise) { EXPECT_EQ(theorem1_bound(66.7, 0.9977, 1.0, 5, 0.0), 0.0); }

TEST(GeneralBound, UnitInputs) {
  EXPECT_NEAR(theorem1_bound(1, 1, 1, 1, 0.1), 0.45571067811865473, 1e-15);
}

TEST(GeneralBound, MonotoneInP) {
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double b = theorem1_bound(10, 0.8, 0.6, 7, i / 100.0);
    EXPECT_GE(b, prev);
    prev = b;
  }
}

TEST(GeneralBound, PreconditionsChecked) {
  EXPECT_THROW(theorem1_bound(0.5, 1, 1, 1, 0.1), DomainError);
  EXPECT_THROW(theorem1_bound(1, 0, 1, 1, 0.1), DomainError);
  EXPECT_THROW(theorem1_bound(1, 1, 1, 0, 0.1), DomainError);
  EXPECT_THROW(theorem1_bound(1, 1, 1, 1, 1.1), DomainError);
}

TEST(Pmax, FrozenValues) {
  const std::pair<int, double> expected[] = {{5, 0.0331128873649581},
                                             {6, 0.03653350393015353},
                                             {10, 0.053485488952733196},
                                             {12, 0.06963684459935815},
                                             {14, 0.13083470300382727}};
  for (const auto& [n, v] : expected) EXPECT_NEAR(theorem1_pmax(0.9977, n, 0.04).value(), v, 1e-14) << n;
}

TEST(Pmax, WithinToleranceOfReportedTable) {
  const std::pair<int, double> reported[] = {{5, 0.032}, {6, 0.036}, {10, 0.052}, {12, 0.068}, {14, 0.129}};
  for (const auto& [n, v] : reported) EXPECT_NEAR(theorem1_pmax(0.9977, n, 0.04).value(), v, 0.005) << n;
}

TEST(Pmax, InvalidWhenDeltaTooLarge) {
  EXPECT_FALSE(theorem1_pmax(0.9977, 15, 0.04).is_finite());
  EXPECT_FALSE(theorem1_pmax(1.0, 1, 1.5).is_finite());
}

TEST(Pmax, VanishesWithDelta) {
  EXPECT_LT(theorem1_pmax(1.0, 5, 1e-12).value(), 1e-11);
  EXPECT_THROW(theorem1_pmax(1.0, 5, 0.0), DomainError);
}

TEST(DepolarizingError, Values) {
  EXPECT_EQ(theorem2_relative_error(3, 0.0).value(), 0.0);
  EXPECT_NEAR(theorem2_relative_error(1, 0.5).value(), 1.0, 1e-15);
  EXPECT_NEAR(theorem2_relative_error(5, 0.01).value(), 0.05153571281335032, 1e-15);
  EXPECT_EQ(theorem2_relative_error(5, 1.0).status(), BoundValue::Status::divergent);
  EXPECT_GT(theorem2_relative_error(1, 1e-9).value(), 0.0);
}

TEST(Higham, Values) {
  EXPECT_NEAR(higham_bound(7, 0, 0.1).value(), 0.7, 1e-15);
  EXPECT_NEAR(higham_bound(1, 0.1, 0.1).value(), 0.2 / 0.9, 1e-15);
  EXPECT_FALSE(higham_bound(10, 0.1, 0.0).is_finite());
  EXPECT_THROW(higham_bound(10, 0.1, 0.0).value(), DomainError);
}

TEST(Higham, SampledInequalityHolds) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0, 1);
  std::uniform_real_distribution<double> unit(0, 1);
  int checked = 0;
  while (checked < 1000) {
    const int n = 2 + static_cast<int>(unit(rng) * 5);
    RealMatrix m(n, n), dm(n, n);
    RealVector y(n), dy(n);
    for (int i = 0; i < n * n; ++i) {
      m(i / n, i % n) = normal(rng);
      dm(i / n, i % n) = normal(rng);
    }
    for (int i = 0; i < n; ++i) {
      y(i) = normal(rng);
      dy(i) = normal(rng);
    }
    const double cond = linalg::condition_number(m);
    if (!std::isfinite(cond) || cond > 1e6) continue;
    dm *= unit(rng) / (cond * dm.norm() / m.norm());  // cond * rel_dM in (0, 1)
    dy *= 0.5 * unit(rng) * y.norm() / dy.norm();
    const double rel_dm = dm.norm() / m.norm();
    const double rel_dy = dy.norm() / y.norm();
    const BoundValue b = higham_bound(cond, rel_dm, rel_dy);
    if (!b.is_finite()) continue;
    const RealVector x = m.fullPivLu().solve(y);
    const RealVector xp = (m + dm).fullPivLu().solve(y + dy);
    EXPECT_LE((xp - x).norm() / x.norm(), b.value() * (1 + 1e-9));
    ++checked;
  }
}

TEST(Loose, AtLeastTheorem1WhereValid) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  int valid = 0;
  for (int i = 0; i < 2000; ++i) {
    const double cond = 1 + 50 * u(rng);
    const double nm = 0.1 + 2 * u(rng);
    const double ny = 0.1 + 2 * u(rng);
    const int n = 1 + static_cast<int>(14 * u(rng));
    const double p = 0.01 * u(rng);
    const BoundValue loose = loose_theorem1_bound(cond, nm, ny, n, p);
    if (!loose.is_finite()) continue;
    ++valid;
    EXPECT_GE(loose.value(), theorem1_bound(cond, nm, ny, n, p));
  }
  EXPECT_GT(valid, 100);
}

TEST(Loose, InvalidAboveConditionCap) {
  const double cap = loose_condition_cap(0.9977, 5, 0.01).value();
  EXPECT_TRUE(loose_theorem1_bound(0.99 * cap, 0.9977, 1.0, 5, 0.01).is_finite());
  EXPECT_FALSE(loose_theorem1_bound(1.01 * cap, 0.9977, 1.0, 5, 0.01).is_finite());
  EXPECT_EQ(loose_theorem1_bound(100, 0.9977, 1.0, 5, 0.0).value(), 0.0);
}

TEST(Caps, Values) {
  const auto zero = elementwise_caps(3, 0.0);
  EXPECT_EQ(zero.M, 0.0);
  EXPECT_EQ(zero.Y, 0.0);
  const auto one = elementwise_caps(3, 1.0);
  EXPECT_NEAR(one.M, 0.5, 1e-15);
  EXPECT_NEAR(one.Y, 1 / std::sqrt(2.0), 1e-15);
  const auto c = elementwise_caps(2, 0.1);
  EXPECT_NEAR(c.M, 0.17195, 1e-15);
  EXPECT_NEAR(c.Y, 0.13435028842544397, 1e-15);
}

TEST(Pascal, Rows) {
  EXPECT_EQ(pascal_coefficients(0), (std::vector<std::int64_t>{1}));
  EXPECT_EQ(pascal_coefficients(1), (std::vector<std::int64_t>{2, -1}));
  EXPECT_EQ(pascal_coefficients(2), (std::vector<std::int64_t>{3, -3, 1}));
  EXPECT_EQ(pascal_coefficients(4), (std::vector<std::int64_t>{5, -10, 10, -5, 1}));
  EXPECT_THROW(pascal_coefficients(-1), DomainError);
}

TEST(Pascal, SumIsOne) {
  for (int n = 0; n <= 60; ++n) {
    const auto c = pascal_coefficients(n);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::int64_t{0}), 1) << n;
  }
}

TEST(Pascal, ExpandsOneMinusPowerOfComplement) {
  // 1 - (1-p)^{n+1} = sum_j a_j p^{j+1}.
  const double p = 0.37;
  for (int n = 0; n <= 12; ++n) {
    const auto c = pascal_coefficients(n);
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += c[j] * std::pow(p, j + 1);
    EXPECT_NEAR(s, 1 - std::pow(1 - p, n + 1), 1e-12);
  }
}

TEST(Report, Theorem1OnlyInsideRange) {
  const auto inside = make_bound_report(66.7239, 0.9977, 1.0, 5, 0.02, 0.04);
  EXPECT_TRUE(inside.theorem1.is_finite());
  const auto outside = make_bound_report(66.7239, 0.9977, 1.0, 5, 0.05, 0.04);
  EXPECT_FALSE(outside.theorem1.is_finite());
  EXPECT_TRUE(outside.theorem2.is_finite());
  EXPECT_EQ(make_bound_report(2, 1, 1, 3, 0.0, 0.04).theorem2.value(), 0.0);
}
