#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "specbound/error.hpp"
#include "specbound/series.hpp"

namespace specbound {

// The two frequencies where the spectral density is real and the estimation
// problem is one-sided.
enum class BoundaryFreq { Zero, Pi };

[[nodiscard]] inline double boundary_value(BoundaryFreq freq) noexcept {
  return freq == BoundaryFreq::Zero ? 0.0 : kPi;
}

enum class KernelShape { Uniform, Triangular };

// Kernel on (0, 1] for the weighted fit. The uniform kernel reproduces the
// unweighted fit exactly. Moments have closed forms used by the analytic
// mean-squared-error expressions.
struct OneSidedKernel {
  KernelShape shape = KernelShape::Uniform;

  [[nodiscard]] double operator()(double u) const {
    if (u < 0.0 || u > 1.0) return 0.0;
    return shape == KernelShape::Uniform ? 1.0 : 1.0 - u;
  }

  // integral of u^s K(u) over (0, 1)
  [[nodiscard]] double moment(int s) const {
    const double a = static_cast<double>(s) + 1.0;
    if (shape == KernelShape::Uniform) return 1.0 / a;
    return 1.0 / (a * (a + 1.0));
  }

  // integral of u^s K(u)^2 over (0, 1)
  [[nodiscard]] double square_moment(int s) const {
    const double a = static_cast<double>(s) + 1.0;
    if (shape == KernelShape::Uniform) return 1.0 / a;
    return 2.0 / (a * (a + 1.0) * (a + 2.0));
  }
};

// One-sided design of Fourier frequencies next to the boundary. At zero the
// design runs over s = 1..M (the origin itself is excluded because the
// centered periodogram vanishes there); at pi it runs over the M highest
// indices of the half grid. x stores the squared distances (theta - w_s)^2
// that the quadratic is fit against.
struct BoundaryDesign {
  BoundaryFreq freq = BoundaryFreq::Zero;
  double theta = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t points = 0;  // M = floor(delta * n)
  std::vector<long> s;
  std::vector<double> w;
  std::vector<double> x;
};

[[nodiscard]] inline BoundaryDesign boundary_design(std::size_t n,
                                                    BoundaryFreq freq,
                                                    double delta) {
  if (!(delta > 0.0) || !(delta < 0.5)) {
    throw error("boundary-lq", "delta must lie in (0, 0.5)");
  }
  const auto half = static_cast<long>(n / 2);
  const auto M = static_cast<long>(std::floor(
      delta * static_cast<double>(n)));
  if (M < 3) {
    throw error("boundary-lq",
                "bandwidth too small: floor(delta * n) = " +
                    std::to_string(M) + ", need at least 3");
  }
  if (M > half) {
    throw error("boundary-lq",
                "bandwidth too large: floor(delta * n) = " +
                    std::to_string(M) + " exceeds the half grid " +
                    std::to_string(half));
  }
  BoundaryDesign design;
  design.freq = freq;
  design.theta = boundary_value(freq);
  design.delta = delta;
  design.n = n;
  design.points = static_cast<std::size_t>(M);
  const long lo = (freq == BoundaryFreq::Zero) ? 1 : half - M + 1;
  for (long s = lo; s < lo + M; ++s) {
    const double w = kTwoPi * static_cast<double>(s) / static_cast<double>(n);
    const double d = design.theta - w;
    design.s.push_back(s);
    design.w.push_back(w);
    design.x.push_back(d * d);
  }
  return design;
}

// Fitted parabola y ~ a + b (theta - w)^2. The intercept is the spectral
// estimate at the boundary; the curvature is kept as a diagnostic.
struct QuadFit {
  double intercept = 0.0;
  double curvature = 0.0;
  std::size_t points = 0;  // design frequencies used
  double delta = 0.0;
};

namespace detail {

struct DesignMoments {
  double c0 = 0.0, c2 = 0.0, c4 = 0.0;  // weighted means of 1, x, x^2
  double denom = 0.0;                   // c0 * c4 - c2^2
  std::vector<double> v;                // kernel weights, empty when uniform
};

[[nodiscard]] inline DesignMoments design_moments(
    const BoundaryDesign& design, const OneSidedKernel* kernel) {
  DesignMoments mom;
  const auto M = static_cast<double>(design.points);
  const double band = kTwoPi * design.delta;
  std::size_t positive = design.x.size();
  for (std::size_t i = 0; i < design.x.size(); ++i) {
    double v = 1.0;
    if (kernel != nullptr) {
      const double u = std::abs(design.theta - design.w[i]) / band;
      v = (*kernel)(u) / band;
      mom.v.push_back(v);
      if (!(v > 0.0)) --positive;
    }
    mom.c0 += v;
    mom.c2 += v * design.x[i];
    mom.c4 += v * design.x[i] * design.x[i];
  }
  mom.c0 /= M;
  mom.c2 /= M;
  mom.c4 /= M;
  mom.denom = mom.c0 * mom.c4 - mom.c2 * mom.c2;
  if (positive < 3) {
    throw error("boundary-lq",
                "degenerate weights: fewer than 3 design points carry "
                "positive weight");
  }
  if (!(mom.denom > 1e-300) || mom.denom <= 1e-12 * mom.c0 * mom.c4) {
    throw error("boundary-lq",
                "degenerate design: cannot separate intercept from curvature");
  }
  return mom;
}

}  // namespace detail

[[nodiscard]] inline QuadFit wls_quadratic_fit(const std::vector<double>& y,
                                               const BoundaryDesign& design,
                                               const OneSidedKernel& kernel) {
  if (y.size() != design.x.size()) {
    throw error("boundary-lq", "response length does not match the design");
  }
  const detail::DesignMoments mom = detail::design_moments(design, &kernel);
  const auto M = static_cast<double>(design.points);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    m0 += mom.v[i] * y[i];
    m1 += mom.v[i] * design.x[i] * y[i];
  }
  m0 /= M;
  m1 /= M;
  return {(mom.c4 * m0 - mom.c2 * m1) / mom.denom,
          (mom.c0 * m1 - mom.c2 * m0) / mom.denom, design.points,
          design.delta};
}

[[nodiscard]] inline QuadFit ols_quadratic_fit(const std::vector<double>& y,
                                               const BoundaryDesign& design) {
  if (y.size() != design.x.size()) {
    throw error("boundary-lq", "response length does not match the design");
  }
  const detail::DesignMoments mom = detail::design_moments(design, nullptr);
  const auto M = static_cast<double>(design.points);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    m0 += y[i];
    m1 += design.x[i] * y[i];
  }
  m0 /= M;
  m1 /= M;
  return {(mom.c4 * m0 - mom.c2 * m1) / mom.denom,
          (mom.c0 * m1 - mom.c2 * m0) / mom.denom, design.points,
          design.delta};
}

// Influence weights g_s such that the fitted intercept equals
// M^{-1} sum_s g_s y_s. Averaging to one and annihilating the quadratic
// term are exact algebraic identities of these weights.
[[nodiscard]] inline std::vector<double> influence_weights(
    const BoundaryDesign& design, const OneSidedKernel* kernel = nullptr) {
  const detail::DesignMoments mom = detail::design_moments(design, kernel);
  std::vector<double> g(design.x.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = kernel ? mom.v[i] : 1.0;
    g[i] = v * (mom.c4 - mom.c2 * design.x[i]) / mom.denom;
  }
  return g;
}

// Periodogram ordinates over the half grid s = 1..floor(n/2); every
// boundary design reads a prefix (theta = 0) or suffix (theta = pi) of it.
[[nodiscard]] inline PeriodogramOrdinates half_grid_ordinates(
    const MultivariateSeries& series) {
  std::vector<long> s;
  for (long i = 1; i <= static_cast<long>(series.n() / 2); ++i) {
    s.push_back(i);
  }
  return {series, std::move(s)};
}

// Position of design index s within the half grid.
[[nodiscard]] inline std::size_t half_grid_position(long s) {
  return static_cast<std::size_t>(s - 1);
}

[[nodiscard]] inline QuadFit lq_entry_fit(const PeriodogramOrdinates& half,
                                          std::size_t j, std::size_t k,
                                          const BoundaryDesign& design,
                                          const OneSidedKernel& kernel = {}) {
  std::vector<double> y;
  y.reserve(design.s.size());
  for (long s : design.s) {
    y.push_back(half.real(j, k, half_grid_position(s)));
  }
  if (kernel.shape == KernelShape::Uniform) {
    return ols_quadratic_fit(y, design);
  }
  return wls_quadratic_fit(y, design, kernel);
}

// Spectral matrix at a boundary via per-entry local quadratic fits of the
// real cross-periodogram; real and symmetric by construction.
[[nodiscard]] inline Eigen::MatrixXd lq_spectral_matrix(
    const MultivariateSeries& series, BoundaryFreq freq,
    const Eigen::MatrixXd& deltas, const OneSidedKernel& kernel = {}) {
  series.require_estimable();
  const auto m = static_cast<Eigen::Index>(series.m());
  if (deltas.rows() != m || deltas.cols() != m) {
    throw error("boundary-lq", "delta matrix has wrong dimensions");
  }
  const PeriodogramOrdinates half = half_grid_ordinates(series);
  Eigen::MatrixXd f(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j; k < m; ++k) {
      if (deltas(j, k) != deltas(k, j)) {
        throw error("boundary-lq", "delta matrix must be symmetric");
      }
      const BoundaryDesign design =
          boundary_design(series.n(), freq, deltas(j, k));
      const QuadFit fit =
          lq_entry_fit(half, static_cast<std::size_t>(j),
                       static_cast<std::size_t>(k), design, kernel);
      f(j, k) = fit.intercept;
      f(k, j) = fit.intercept;
    }
  }
  return f;
}

// Single-bandwidth convenience overload.
[[nodiscard]] inline Eigen::MatrixXd lq_spectral_matrix(
    const MultivariateSeries& series, BoundaryFreq freq, double delta,
    const OneSidedKernel& kernel = {}) {
  const auto m = static_cast<Eigen::Index>(series.m());
  return lq_spectral_matrix(series, freq,
                            Eigen::MatrixXd::Constant(m, m, delta), kernel);
}

}  // namespace specbound
