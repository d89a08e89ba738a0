#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>

#include "specbound/error.hpp"
#include "specbound/estimator.hpp"
#include "specbound/psd.hpp"
#include "specbound/series.hpp"

namespace specbound {

namespace detail {

// Regularized upper incomplete gamma Q(a, x), series expansion for
// x < a + 1 and a Lentz continued fraction otherwise. Absolute error is
// well below 1e-10 over the chi-squared arguments used here.
[[nodiscard]] inline double regularized_gamma_q(double a, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// P(chi-squared with df degrees of freedom > x); exact exp(-x/2) when df=2.
[[nodiscard]] inline double chi2_survival(double x, int df) {
  if (!(x >= 0.0)) {
    throw error("inference", "chi-squared argument must be nonnegative");
  }
  if (df < 1) {
    throw error("inference", "degrees of freedom must be at least 1");
  }
  if (x == 0.0) return 1.0;
  if (df == 2) return std::exp(-0.5 * x);
  return detail::regularized_gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

struct WaldResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double pvalue = 1.0;
  Eigen::MatrixXd fhat0;  // spectral matrix the statistic inverted
  std::string method;
};

// (n / 2*pi) diff' fhat0^{-1} diff, inverted through the eigendecomposition
// so the positive-definiteness guard and the quadratic form use the same
// factorization.
[[nodiscard]] inline double wald_statistic(const Eigen::VectorXd& diff,
                                           const Eigen::MatrixXd& fhat0,
                                           std::size_t n) {
  if (fhat0.rows() != diff.size() || fhat0.cols() != diff.size()) {
    throw error("inference", "mean vector and spectral matrix disagree");
  }
  const EigenDecomp decomp = eigen_symmetric(fhat0);
  double quad = 0.0;
  for (Eigen::Index i = 0; i < decomp.values.size(); ++i) {
    if (!(decomp.values(i) > 0.0)) {
      throw error("inference",
                  "singular spectral matrix at frequency zero");
    }
    const double proj = decomp.vectors.col(i).dot(diff);
    quad += proj * proj / decomp.values(i);
  }
  return static_cast<double>(n) / kTwoPi * quad;
}

struct WaldOptions {
  Method method = Method::LocalQuadratic;
  OneSidedKernel kernel{};
  SearchConfig search{};
  EmpiricalRuleConfig rule{};
  double eps = 0.01;
  bool rescale = true;
};

// Wald test of the mean vector against mu0, using the long-run covariance
// pipeline (positive-definite by the eps/n clamp) for the spectral matrix.
[[nodiscard]] inline WaldResult wald_test(const MultivariateSeries& series,
                                          const Eigen::VectorXd& mu0,
                                          const WaldOptions& opt = {}) {
  if (mu0.size() != static_cast<Eigen::Index>(series.m())) {
    throw error("inference",
                "mu0 length does not match the number of components");
  }
  LongRunOptions lr;
  lr.method = opt.method;
  lr.kernel = opt.kernel;
  lr.search = opt.search;
  lr.rule = opt.rule;
  lr.eps = opt.eps;
  lr.rescale = opt.rescale;
  const LongRunCov cov = longrun_covariance(series, lr);

  WaldResult out;
  out.fhat0 = cov.fhat0;
  out.method = method_label(opt.method);
  out.df = series.m();
  const Eigen::VectorXd diff = sample_mean(series) - mu0;
  out.statistic = wald_statistic(diff, cov.fhat0, series.n());
  out.pvalue = chi2_survival(out.statistic, static_cast<int>(out.df));
  return out;
}

}  // namespace specbound
