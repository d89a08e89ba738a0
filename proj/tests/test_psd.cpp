#include <specbound/estimator.hpp>
#include <specbound/psd.hpp>
#include <specbound/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using namespace specbound;

Eigen::MatrixXd reconstruct(const EigenDecomp& d) {
  return d.vectors * d.values.asDiagonal() * d.vectors.transpose();
}

TEST(EigenSymmetric, IdentityAndDiagonalExamples) {
  const EigenDecomp id = eigen_symmetric(Eigen::MatrixXd::Identity(3, 3));
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(id.values(i), 1.0, 1e-14);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = -1.0;
  const EigenDecomp d = eigen_symmetric(a);
  EXPECT_NEAR(d.values(0), 3.0, 1e-14);
  EXPECT_NEAR(d.values(1), -1.0, 1e-14);
  EXPECT_LT((reconstruct(d) - a).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(EigenSymmetric, TridiagonalToeplitzSpectrum) {
  Eigen::MatrixXd a(3, 3);
  a << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const EigenDecomp d = eigen_symmetric(a);
  const double root2 = std::sqrt(2.0);
  EXPECT_NEAR(d.values(0), 2.0 + root2, 1e-12);
  EXPECT_NEAR(d.values(1), 2.0, 1e-12);
  EXPECT_NEAR(d.values(2), 2.0 - root2, 1e-12);
  EXPECT_LT((reconstruct(d) - a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((d.vectors * d.vectors.transpose() -
             Eigen::MatrixXd::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(EigenSymmetric, ValuesComeOutDescending) {
  RngStream rng(11, 0);
  Eigen::MatrixXd b(4, 4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    for (Eigen::Index k = 0; k < 4; ++k) b(j, k) = rng.next_gaussian();
  }
  const Eigen::MatrixXd sym = b + b.transpose();
  const EigenDecomp d = eigen_symmetric(sym);
  for (Eigen::Index i = 1; i < 4; ++i) {
    EXPECT_GE(d.values(i - 1), d.values(i));
  }
  EXPECT_LT((reconstruct(d) - sym).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EigenSymmetric, RejectsBadInput) {
  EXPECT_THROW(eigen_symmetric(Eigen::MatrixXd::Zero(2, 3)), error);
  EXPECT_THROW(eigen_symmetric(Eigen::MatrixXd::Zero(0, 0)), error);

  Eigen::MatrixXd skew(2, 2);
  skew << 1.0, 0.5, -0.5, 1.0;
  EXPECT_THROW(eigen_symmetric(skew), error);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = bad(1, 0) = std::nan("");
  try {
    (void)eigen_symmetric(bad);
    FAIL() << "expected a psd error";
  } catch (const error& e) {
    EXPECT_EQ(e.module(), "psd");
  }
}

TEST(PsdPolicyRules, FloorValues) {
  EXPECT_EQ(PsdPolicy{}.floor_value(0), 0.0);
  EXPECT_EQ(PsdPolicy{}.floor_value(500), 0.0);
  const PsdPolicy eps{PsdPolicyKind::ClampEps, 0.01};
  EXPECT_DOUBLE_EQ(eps.floor_value(100), 1e-4);
  EXPECT_THROW((void)eps.floor_value(0), error);
  const PsdPolicy bad{PsdPolicyKind::ClampEps, 0.0};
  EXPECT_THROW((void)bad.floor_value(100), error);
}

TEST(PsdCorrect, ClampsNegativeEigenvaluesToTheFloor) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = -1.0;

  const Eigen::MatrixXd zeroed = psd_correct(a, PsdPolicy{});
  EXPECT_NEAR(zeroed(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(zeroed(1, 1), 0.0, 1e-12);
  EXPECT_NEAR(zeroed(0, 1), 0.0, 1e-12);

  const PsdPolicy eps{PsdPolicyKind::ClampEps, 0.01};
  const Eigen::MatrixXd floored = psd_correct(a, eps, 100);
  EXPECT_NEAR(floored(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(floored(1, 1), 1e-4, 1e-12);
}

TEST(PsdCorrect, LeavesPositiveDefiniteInputAlone) {
  RngStream rng(5, 0);
  Eigen::MatrixXd b(3, 3);
  for (Eigen::Index j = 0; j < 3; ++j) {
    for (Eigen::Index k = 0; k < 3; ++k) b(j, k) = rng.next_gaussian();
  }
  const Eigen::MatrixXd psd =
      b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd out = psd_correct(psd, PsdPolicy{});
  EXPECT_LT((out - psd).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PsdCorrect, IdempotentWithTraceIdentity) {
  Eigen::MatrixXd a(3, 3);
  a << 1.0, 2.0, 0.3, 2.0, -1.5, 0.7, 0.3, 0.7, 0.2;
  const PsdPolicy eps{PsdPolicyKind::ClampEps, 0.01};
  const Eigen::MatrixXd once = psd_correct(a, eps, 50);
  const Eigen::MatrixXd twice = psd_correct(once, eps, 50);
  EXPECT_LT((twice - once).cwiseAbs().maxCoeff(), 1e-10);

  const double floor = eps.floor_value(50);
  const EigenDecomp d = eigen_symmetric(a);
  double expected_trace = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    expected_trace += std::max(d.values(i), floor);
  }
  EXPECT_NEAR(once.trace(), expected_trace, 1e-10);

  const EigenDecomp after = eigen_symmetric(once);
  EXPECT_GE(after.values.minCoeff(), floor - 1e-12);
}

TEST(PsdCorrect, OutputExactlySymmetric) {
  Eigen::MatrixXd a(3, 3);
  a << 0.4, -1.1, 0.9, -1.1, 0.3, 0.25, 0.9, 0.25, -2.0;
  const Eigen::MatrixXd out = psd_correct(a, PsdPolicy{});
  for (Eigen::Index j = 0; j < 3; ++j) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      EXPECT_EQ(out(j, k), out(k, j));
    }
  }
}

MultivariateSeries iid_pair(std::size_t n, double sd2, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> values;
  values.reserve(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    values.push_back(rng.next_gaussian());
    values.push_back(sd2 * rng.next_gaussian());
  }
  return {n, 2, std::move(values)};
}

TEST(LongRunCovariance, IidSeriesRecoverTheInnovationCovariance) {
  const MultivariateSeries s = iid_pair(2000, 2.0, 404);
  const LongRunCov cov = longrun_covariance(s);
  EXPECT_NEAR(cov.omega(0, 0), 1.0, 0.2);
  EXPECT_NEAR(cov.omega(1, 1), 4.0, 0.8);
  EXPECT_NEAR(cov.omega(0, 1), 0.0, 0.5);
  EXPECT_EQ(cov.omega(0, 1), cov.omega(1, 0));
  EXPECT_TRUE(cov.rescaled);
  EXPECT_EQ(cov.policy.kind, PsdPolicyKind::ClampEps);
  EXPECT_LT((cov.omega - kTwoPi * cov.fhat0).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_GT(cov.design_sizes.minCoeff(), 0);
}

// With sample mean exactly zero and lag-zero variance exactly one in every
// component, rescaling is arithmetically a no-op, down to the last bit.
TEST(LongRunCovariance, RescaleIsExactNoOpOnStandardizedData) {
  const std::size_t n = 256;
  std::vector<double> values;
  values.reserve(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    values.push_back(t % 2 == 0 ? 1.0 : -1.0);
    values.push_back(t % 4 < 2 ? 1.0 : -1.0);
  }
  const MultivariateSeries s(n, 2, std::move(values));
  EXPECT_EQ(sample_mean(s)(0), 0.0);
  EXPECT_EQ(sample_mean(s)(1), 0.0);
  EXPECT_EQ(sample_autocov(s, 0)(0, 0), 1.0);
  EXPECT_EQ(sample_autocov(s, 0)(1, 1), 1.0);

  LongRunOptions opt;
  opt.rescale = true;
  const LongRunCov with = longrun_covariance(s, opt);
  opt.rescale = false;
  const LongRunCov without = longrun_covariance(s, opt);

  for (Eigen::Index j = 0; j < 2; ++j) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      EXPECT_EQ(with.omega(j, k), without.omega(j, k));
      EXPECT_EQ(with.deltas(j, k), without.deltas(j, k));
      EXPECT_EQ(with.design_sizes(j, k), without.design_sizes(j, k));
    }
  }
  EXPECT_TRUE(with.rescaled);
  EXPECT_FALSE(without.rescaled);
}

TEST(LongRunCovariance, EquivariantUnderPowerOfTwoScaling) {
  const MultivariateSeries s = iid_pair(300, 1.5, 8);
  std::vector<double> scaled;
  scaled.reserve(2 * s.n());
  for (std::size_t t = 0; t < s.n(); ++t) {
    scaled.push_back(1024.0 * s(t, 0));
    scaled.push_back(1024.0 * s(t, 1));
  }
  const MultivariateSeries big(s.n(), 2, std::move(scaled));
  const LongRunCov base = longrun_covariance(s);
  const LongRunCov wide = longrun_covariance(big);
  const double factor = 1024.0 * 1024.0;
  for (Eigen::Index j = 0; j < 2; ++j) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      EXPECT_EQ(wide.omega(j, k), factor * base.omega(j, k));
      EXPECT_EQ(wide.deltas(j, k), base.deltas(j, k));
    }
  }
}

// A decimal diagonal rescaling is not exact in floating point, but the
// rescaled pipeline keeps the selections identical when the objective is
// monotone over the searched interval, so equivariance holds to rounding.
TEST(LongRunCovariance, ApproximatelyEquivariantUnderDecimalScaling) {
  const MultivariateSeries s = iid_pair(256, 1.0, 99);
  const double c0 = 1e3, c1 = 1e-2;
  std::vector<double> scaled;
  scaled.reserve(2 * s.n());
  for (std::size_t t = 0; t < s.n(); ++t) {
    scaled.push_back(c0 * s(t, 0));
    scaled.push_back(c1 * s(t, 1));
  }
  const MultivariateSeries big(s.n(), 2, std::move(scaled));

  LongRunOptions opt;
  opt.search.delta_min = 0.199999;
  opt.search.delta_max = 0.2;
  const LongRunCov base = longrun_covariance(s, opt);
  const LongRunCov wide = longrun_covariance(big, opt);

  const double factors[2] = {c0, c1};
  for (Eigen::Index j = 0; j < 2; ++j) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      const double expected = factors[j] * factors[k] * base.omega(j, k);
      EXPECT_NEAR(wide.omega(j, k), expected,
                  1e-9 * (1.0 + std::abs(expected)));
      EXPECT_EQ(wide.deltas(j, k), base.deltas(j, k));
    }
  }
}

TEST(LongRunCovariance, ZeroVarianceComponentNamesTheOffender) {
  std::vector<double> values;
  RngStream rng(3, 0);
  for (std::size_t t = 0; t < 100; ++t) {
    values.push_back(rng.next_gaussian());
    values.push_back(5.0);
  }
  const MultivariateSeries s(100, 2, std::move(values), {"cpi", "ur"});
  try {
    (void)longrun_covariance(s);
    FAIL() << "expected a psd error";
  } catch (const error& e) {
    EXPECT_EQ(e.module(), "psd");
    EXPECT_NE(std::string(e.what()).find("ur"), std::string::npos);
  }
}

TEST(LongRunCovariance, UnivariateStaysPositive) {
  RngStream rng(21, 0);
  std::vector<double> values;
  for (std::size_t t = 0; t < 400; ++t) values.push_back(rng.next_gaussian());
  const MultivariateSeries s(400, 1, std::move(values));
  const LongRunCov cov = longrun_covariance(s);
  EXPECT_GT(cov.omega(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(cov.omega(0, 0), kTwoPi * cov.fhat0(0, 0));
  EXPECT_NEAR(cov.omega(0, 0), 1.0, 0.45);
}

TEST(LongRunCovariance, FlatTopMethodIsRecorded) {
  const MultivariateSeries s = iid_pair(200, 1.0, 17);
  LongRunOptions opt;
  opt.method = Method::FlatTop;
  const LongRunCov cov = longrun_covariance(s, opt);
  EXPECT_EQ(cov.method, Method::FlatTop);
  EXPECT_NEAR(cov.omega(0, 0), 1.0, 0.5);
  const EigenDecomp d = eigen_symmetric(cov.fhat0);
  EXPECT_GT(d.values.minCoeff(), 0.0);
}

}  // namespace
