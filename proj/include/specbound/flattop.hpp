#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "specbound/error.hpp"
#include "specbound/series.hpp"

namespace specbound {

// Infinitely differentiable flat-top taper: identically 1 on [-c, c],
// identically 0 outside (-1, 1), with a smooth bridge between.
struct FlatTopWindow {
  double c = 0.05;
  double b = 1.0;

  [[nodiscard]] double operator()(double x) const {
    const double a = std::abs(x);
    if (a <= c) return 1.0;
    if (a >= 1.0) return 0.0;
    const double dc = a - c;
    const double d1 = a - 1.0;
    return std::exp(-b * std::exp(-b / (dc * dc)) / (d1 * d1));
  }
};

// Smallest x with lambda(x) <= eps; lambda is monotone on the bridge, so
// bisection on [c, 1] converges. This locates the effective end of the
// window's support and calibrates the bandwidth rule below.
[[nodiscard]] inline double flattop_effective_support(
    const FlatTopWindow& window, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw error("flattop", "effective-support epsilon must lie in (0, 1)");
  }
  double lo = window.c, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (window(mid) <= eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct EmpiricalRuleConfig {
  double c0 = 2.0;       // threshold multiplier on sqrt(log10(n)/n)
  std::size_t k_run = 5;  // consecutive lags that must all fall below it
  double eps_ef = 0.01;  // effective-support level used for calibration
  FlatTopWindow window{};
};

// Smallest m >= 0 such that the next k_run correlation lags all fall below
// the threshold; the scan is directed (order of j, k matters).
[[nodiscard]] inline std::size_t empirical_rule_m(
    const AutocovSequence& acvs, std::size_t j, std::size_t k,
    const EmpiricalRuleConfig& cfg = {}) {
  const std::size_t n = acvs.n();
  const double scale =
      std::sqrt(acvs.entry(j, j, 0) * acvs.entry(k, k, 0));
  if (!(scale > 0.0)) {
    throw error("flattop", "empirical rule needs positive variances");
  }
  const double threshold =
      cfg.c0 * std::sqrt(std::log10(static_cast<double>(n)) /
                         static_cast<double>(n));
  for (std::size_t m = 0; m + 1 < n; ++m) {
    bool all_below = true;
    for (std::size_t h = 1; h <= cfg.k_run; ++h) {
      const long lag = static_cast<long>(m + h);
      const double rho = acvs.entry(j, k, lag) / scale;
      if (std::abs(rho) >= threshold) {
        all_below = false;
        break;
      }
    }
    if (all_below) return m;
  }
  return n - 1;
}

// Bandwidth from the empirical rule: the window must still cover lag 2*m
// meaningfully, so m is doubled and stretched by the effective support of
// the taper, then rounded up. Clamped to [1, n-1].
[[nodiscard]] inline std::size_t bandwidth_from_m(
    std::size_t m, std::size_t n, const EmpiricalRuleConfig& cfg = {}) {
  const double cef = flattop_effective_support(cfg.window, cfg.eps_ef);
  const double raw = 2.0 * static_cast<double>(m) / cef;
  auto big = static_cast<std::size_t>(std::ceil(raw));
  big = std::max<std::size_t>(big, 1);
  big = std::min<std::size_t>(big, n - 1);
  return big;
}

[[nodiscard]] inline std::size_t empirical_rule_bandwidth(
    const AutocovSequence& acvs, std::size_t j, std::size_t k,
    const EmpiricalRuleConfig& cfg = {}) {
  const std::size_t m_jk = empirical_rule_m(acvs, j, k, cfg);
  const std::size_t m_kj =
      (j == k) ? m_jk : empirical_rule_m(acvs, k, j, cfg);
  return bandwidth_from_m(std::max(m_jk, m_kj), acvs.n(), cfg);
}

// Per-entry bandwidths; symmetric because cross entries take the larger of
// the two directed scans.
[[nodiscard]] inline Eigen::MatrixXi bandwidth_matrix(
    const AutocovSequence& acvs, const EmpiricalRuleConfig& cfg = {}) {
  const auto m = static_cast<Eigen::Index>(acvs.m());
  Eigen::MatrixXi bw(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j; k < m; ++k) {
      const auto v = static_cast<int>(empirical_rule_bandwidth(
          acvs, static_cast<std::size_t>(j), static_cast<std::size_t>(k),
          cfg));
      bw(j, k) = v;
      bw(k, j) = v;
    }
  }
  return bw;
}

// Lag-window estimate of one spectral entry at frequency w:
// (2*pi)^{-1} sum_h lambda(h/M) gamma(h) e^{-iwh}, summed over the window's
// support |h| < M (and |h| < n, beyond which gamma vanishes).
[[nodiscard]] inline std::complex<double> flattop_spectral_entry(
    const AutocovSequence& acvs, std::size_t j, std::size_t k,
    std::size_t bandwidth, double w, const FlatTopWindow& window = {}) {
  if (bandwidth == 0) {
    throw error("flattop", "bandwidth must be at least 1");
  }
  const long support = std::min<long>(static_cast<long>(bandwidth),
                                      static_cast<long>(acvs.n()));
  double re = window(0.0) * acvs.entry(j, k, 0);
  double im = 0.0;
  for (long h = 1; h < support; ++h) {
    const double lam =
        window(static_cast<double>(h) / static_cast<double>(bandwidth));
    if (lam == 0.0) break;
    const double sum = acvs.entry(j, k, h) + acvs.entry(j, k, -h);
    const double diff = acvs.entry(j, k, h) - acvs.entry(j, k, -h);
    re += lam * sum * std::cos(static_cast<double>(h) * w);
    im -= lam * diff * std::sin(static_cast<double>(h) * w);
  }
  return {re / kTwoPi, im / kTwoPi};
}

// Full flat-top spectral matrix with per-entry bandwidths; Hermitian by
// construction.
[[nodiscard]] inline Eigen::MatrixXcd flattop_spectral_matrix(
    const AutocovSequence& acvs, const Eigen::MatrixXi& bandwidths, double w,
    const FlatTopWindow& window = {}) {
  const auto m = static_cast<Eigen::Index>(acvs.m());
  if (bandwidths.rows() != m || bandwidths.cols() != m) {
    throw error("flattop", "bandwidth matrix has wrong dimensions");
  }
  Eigen::MatrixXcd f(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j; k < m; ++k) {
      if (bandwidths(j, k) != bandwidths(k, j)) {
        throw error("flattop", "bandwidth matrix must be symmetric");
      }
      const auto entry = flattop_spectral_entry(
          acvs, static_cast<std::size_t>(j), static_cast<std::size_t>(k),
          static_cast<std::size_t>(bandwidths(j, k)), w, window);
      f(j, k) = entry;
      f(k, j) = std::conj(entry);
    }
  }
  return f;
}

// Convenience wrapper: bandwidths from the empirical rule, then the matrix.
[[nodiscard]] inline Eigen::MatrixXcd flattop_spectral_matrix(
    const AutocovSequence& acvs, double w,
    const EmpiricalRuleConfig& cfg = {}) {
  return flattop_spectral_matrix(acvs, bandwidth_matrix(acvs, cfg), w,
                                 cfg.window);
}

}  // namespace specbound
