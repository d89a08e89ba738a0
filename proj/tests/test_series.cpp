#include <specbound/rng.hpp>
#include <specbound/series.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

namespace {

using namespace specbound;

MultivariateSeries alternating_series() {
  return {4, 1, {1.0, -1.0, 1.0, -1.0}};
}

// Deterministic two-component series with a nonzero mean and visible
// cross-dependence; values are exact in binary.
MultivariateSeries patterned_series(std::size_t n) {
  std::vector<double> values;
  values.reserve(n * 2);
  double prev = 0.25;
  for (std::size_t t = 0; t < n; ++t) {
    const double a =
        0.5 + ((t % 3 == 0) ? 1.0 : -0.5) + 0.125 * static_cast<double>(t % 7);
    const double b = 0.75 * prev + ((t % 2 == 0) ? 0.5 : -1.0);
    values.push_back(a);
    values.push_back(b);
    prev = b;
  }
  return {n, 2, std::move(values)};
}

TEST(SeriesCore, ValidatesShapeAndValues) {
  EXPECT_THROW(MultivariateSeries(3, 2, {1.0, 2.0}), error);
  EXPECT_THROW(MultivariateSeries(0, 1, {}), error);
  EXPECT_THROW(MultivariateSeries(2, 1, {1.0, std::nan("")}), error);
  EXPECT_THROW(MultivariateSeries(2, 2, {1, 2, 3, 4}, {"only-one"}), error);
  try {
    MultivariateSeries bad(3, 2, {1.0, 2.0});
    FAIL() << "expected a series-core error";
  } catch (const error& e) {
    EXPECT_EQ(e.module(), "series-core");
  }
}

TEST(SeriesCore, DefaultAndExplicitNames) {
  const MultivariateSeries def(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(def.names(), (std::vector<std::string>{"x1", "x2"}));
  const MultivariateSeries named(2, 2, {1, 2, 3, 4}, {"cpi", "ur"});
  EXPECT_EQ(named.names()[1], "ur");
}

TEST(SeriesCore, RequireEstimableNeedsEightObservations) {
  std::vector<double> seven(7, 1.0);
  EXPECT_THROW(MultivariateSeries(7, 1, seven).require_estimable(), error);
  std::vector<double> eight(8, 1.0);
  EXPECT_NO_THROW(MultivariateSeries(8, 1, eight).require_estimable());
}

TEST(SeriesCore, AlternatingSeriesMoments) {
  const MultivariateSeries s = alternating_series();
  EXPECT_DOUBLE_EQ(sample_mean(s)(0), 0.0);
  EXPECT_DOUBLE_EQ(sample_autocov(s, 0)(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sample_autocov(s, 1)(0, 0), -0.75);
}

TEST(SeriesCore, AutocovTransposeRuleAndRange) {
  const MultivariateSeries s = patterned_series(40);
  const AutocovSequence acvs(s);
  for (long h : {1L, 3L, 11L}) {
    const Eigen::MatrixXd pos = acvs.at(h);
    const Eigen::MatrixXd neg = acvs.at(-h);
    EXPECT_LT((neg - pos.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_DOUBLE_EQ(acvs.entry(0, 1, -h), acvs.entry(1, 0, h));
  }
  EXPECT_EQ(acvs.at(40).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(acvs.entry(0, 0, 40), 0.0);
  EXPECT_EQ(acvs.entry(1, 1, -41), 0.0);
}

TEST(SeriesCore, AutocovMatchesDirectSums) {
  const MultivariateSeries s = patterned_series(12);
  const Eigen::VectorXd mean = sample_mean(s);
  const AutocovSequence acvs(s);
  for (long h : {0L, 1L, 4L}) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t k = 0; k < 2; ++k) {
        double direct = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(h) < 12; ++t) {
          direct += (s(t + static_cast<std::size_t>(h), j) - mean(j)) *
                    (s(t, k) - mean(k));
        }
        direct /= 12.0;
        EXPECT_NEAR(acvs.entry(j, k, h), direct, 1e-15);
      }
    }
  }
}

TEST(SeriesCore, AssumeZeroMeanSkipsCentering) {
  const MultivariateSeries s = patterned_series(30);
  const AutocovSequence raw(s, Centering::AssumeZeroMean);
  const Eigen::VectorXd mean = sample_mean(s);
  double direct = 0.0;
  for (std::size_t t = 0; t + 1 < 30; ++t) direct += s(t + 1, 0) * s(t, 0);
  direct /= 30.0;
  EXPECT_NEAR(raw.entry(0, 0, 1), direct, 1e-12);
  EXPECT_GT(std::abs(mean(0)), 0.1);
  EXPECT_NE(raw.entry(0, 0, 1), sample_autocov(s, 1)(0, 0));
}

TEST(SeriesCore, FourierIndexSets) {
  const FourierGrid g4 = fourier_frequencies(4);
  EXPECT_EQ(g4.indices, (std::vector<long>{-1, 0, 1, 2}));
  const FourierGrid g5 = fourier_frequencies(5);
  EXPECT_EQ(g5.indices, (std::vector<long>{-2, -1, 0, 1, 2}));
  const FourierGrid g8 = fourier_frequencies(8);
  const std::size_t s1 = 4;  // index s=1 sits after {-3,...,0}
  EXPECT_EQ(g8.indices[s1], 1);
  EXPECT_NEAR(g8.freqs[s1], kPi / 4.0, 1e-15);
  EXPECT_NEAR(g8.freqs.back(), kPi, 1e-15);
  EXPECT_THROW(fourier_frequencies(1), error);
}

TEST(Periodogram, AlternatingSeriesAtPi) {
  const MultivariateSeries s = alternating_series();
  const Eigen::MatrixXcd ip = periodogram(s, kPi);
  EXPECT_NEAR(ip(0, 0).real(), 2.0 / kPi, 1e-14);
  EXPECT_NEAR(ip(0, 0).imag(), 0.0, 1e-14);
}

TEST(Periodogram, VanishesAtFrequencyZero) {
  const MultivariateSeries s = patterned_series(25);
  const Eigen::MatrixXcd i0 = periodogram(s, 0.0);
  EXPECT_LT(i0.cwiseAbs().maxCoeff(), 1e-25);
}

TEST(Periodogram, HermitianWithRealNonnegativeDiagonal) {
  const MultivariateSeries s = patterned_series(33);
  for (double w : {0.3, 1.1, 2.7, kPi}) {
    const Eigen::MatrixXcd ip = periodogram(s, w);
    EXPECT_LT((ip - ip.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GE(ip(0, 0).real(), 0.0);
    EXPECT_GE(ip(1, 1).real(), 0.0);
  }
}

// At Fourier frequencies the periodogram equals the Fourier transform of the
// sample autocovariances; the two computations share no code.
TEST(Periodogram, MatchesAutocovarianceTransform) {
  const std::size_t n = 16;
  const MultivariateSeries s = patterned_series(n);
  const AutocovSequence acvs(s);
  for (long idx = 1; idx <= static_cast<long>(n / 2); ++idx) {
    const double w = kTwoPi * static_cast<double>(idx) / static_cast<double>(n);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(2, 2);
    for (long h = -static_cast<long>(n) + 1; h < static_cast<long>(n); ++h) {
      const std::complex<double> phase(
          std::cos(w * static_cast<double>(h)),
          -std::sin(w * static_cast<double>(h)));
      sum += acvs.at(h) * phase;
    }
    sum /= kTwoPi;
    const Eigen::MatrixXcd ip = periodogram(s, w);
    EXPECT_LT((ip - sum).cwiseAbs().maxCoeff(), 1e-8)
        << "mismatch at Fourier index " << idx;
  }
}

TEST(Periodogram, ScaleEquivariance) {
  const std::size_t n = 20;
  const MultivariateSeries s = patterned_series(n);
  std::vector<double> scaled;
  for (std::size_t t = 0; t < n; ++t) {
    scaled.push_back(4.0 * s(t, 0));
    scaled.push_back(4.0 * s(t, 1));
  }
  const MultivariateSeries s4(n, 2, std::move(scaled));
  for (double w : {0.5, 2.0}) {
    const double base = real_cross_periodogram(s, 0, 1, w);
    EXPECT_DOUBLE_EQ(real_cross_periodogram(s4, 0, 1, w), 16.0 * base);
  }
}

TEST(Periodogram, ShiftInvarianceFromCentering) {
  const std::size_t n = 24;
  const MultivariateSeries s = patterned_series(n);
  std::vector<double> shifted;
  for (std::size_t t = 0; t < n; ++t) {
    shifted.push_back(s(t, 0) + 100.0);
    shifted.push_back(s(t, 1) - 3.0);
  }
  const MultivariateSeries sh(n, 2, std::move(shifted));
  for (double w : {0.4, 1.9, kPi}) {
    const Eigen::MatrixXcd a = periodogram(s, w);
    const Eigen::MatrixXcd b = periodogram(sh, w);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Periodogram, RealCrossEqualsMatrixRealPart) {
  const MultivariateSeries s = patterned_series(18);
  for (double w : {0.6, 1.4}) {
    const Eigen::MatrixXcd ip = periodogram(s, w);
    EXPECT_NEAR(real_cross_periodogram(s, 0, 1, w), ip(0, 1).real(), 1e-15);
    EXPECT_NEAR(real_cross_periodogram(s, 1, 0, w), ip(1, 0).real(), 1e-15);
  }
  EXPECT_THROW((void)real_cross_periodogram(s, 0, 2, 0.5), error);
}

TEST(Periodogram, OrdinatesMatchDirectEvaluation) {
  const std::size_t n = 32;
  const MultivariateSeries s = patterned_series(n);
  std::vector<long> idx;
  for (long i = 1; i <= static_cast<long>(n / 2); ++i) idx.push_back(i);
  const PeriodogramOrdinates ords(s, idx);
  ASSERT_EQ(ords.indices().size(), n / 2);
  for (std::size_t i = 0; i < ords.indices().size(); ++i) {
    const double w = kTwoPi * static_cast<double>(ords.indices()[i]) /
                     static_cast<double>(n);
    EXPECT_NEAR(ords.real(0, 1, i), real_cross_periodogram(s, 0, 1, w), 1e-13);
    EXPECT_NEAR(ords.real(1, 1, i), real_cross_periodogram(s, 1, 1, w), 1e-13);
  }
}

TEST(RngStream, DeterministicAndStreamSeparated) {
  RngStream a(7, 0), b(7, 0), c(7, 1);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
  }
  bool differs = false;
  RngStream a2(7, 0);
  for (int i = 0; i < 8; ++i) {
    differs = differs || (a2.next_u64() != c.next_u64());
  }
  EXPECT_TRUE(differs);
}

TEST(RngStream, UniformInHalfOpenUnitIntervalAndGaussianMoments) {
  RngStream rng(2024, 5);
  double sum = 0.0, sumsq = 0.0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    const double u = rng.next_uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
    const double g = rng.next_gaussian();
    sum += g;
    sumsq += g * g;
  }
  EXPECT_NEAR(sum / reps, 0.0, 0.03);
  EXPECT_NEAR(sumsq / reps, 1.0, 0.04);
}

}  // namespace
