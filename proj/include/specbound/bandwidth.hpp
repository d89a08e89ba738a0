#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "specbound/boundary_fit.hpp"
#include "specbound/error.hpp"
#include "specbound/flattop.hpp"
#include "specbound/series.hpp"

namespace specbound {

// Search range and stopping rule for the bandwidth-fraction search. A
// non-positive delta_min means "resolve automatically": the larger of 3/n
// (the smallest usable design) and 0.01.
struct SearchConfig {
  double delta_min = 0.0;
  double delta_max = 0.35;
  int grid_points = 40;
  double tol = 1e-4;
  bool grid_only = false;        // skip refinement, scan a dense grid
  int exhaustive_points = 2000;  // dense grid size for grid_only
};

[[nodiscard]] inline double resolved_delta_min(const SearchConfig& cfg,
                                               std::size_t n) {
  double dmin = cfg.delta_min;
  if (dmin <= 0.0) {
    dmin = std::max(3.0 / static_cast<double>(n), 0.01);
  }
  // Nudge past floating-point drop-off so floor(dmin * n) keeps >= 3 points.
  while (std::floor(dmin * static_cast<double>(n)) < 3.0) {
    dmin = std::nextafter(dmin, 1.0);
  }
  return dmin;
}

// Smoothed cross-spectrum used as the plug-in pilot: flat-top tapered
// autocovariances with the empirical-rule bandwidths, evaluated over the
// Fourier half grid and at the two boundaries. Also carries the fourth
// derivative proxy r4 that the weighted-fit bias expression needs.
class PilotSpectrum {
 public:
  PilotSpectrum(const AutocovSequence& acvs, Eigen::MatrixXi bandwidths,
                FlatTopWindow window = {})
      : n_(acvs.n()),
        m_(acvs.m()),
        half_(acvs.n() / 2),
        bandwidths_(std::move(bandwidths)),
        window_(window) {
    const auto mi = static_cast<Eigen::Index>(m_);
    if (bandwidths_.rows() != mi || bandwidths_.cols() != mi) {
      throw error("bandwidth", "pilot bandwidth matrix has wrong dimensions");
    }
    pairs_.resize(m_ * m_);
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t k = j; k < m_; ++k) {
        PairPilot& p = pairs_[j * m_ + k];
        const auto bw = static_cast<std::size_t>(
            bandwidths_(static_cast<Eigen::Index>(j),
                        static_cast<Eigen::Index>(k)));
        if (bw == 0) {
          throw error("bandwidth", "pilot bandwidth must be at least 1");
        }
        p.re.resize(half_);
        p.im.resize(half_);
        for (std::size_t pos = 0; pos < half_; ++pos) {
          const double w = kTwoPi * static_cast<double>(pos + 1) /
                           static_cast<double>(n_);
          const auto v = flattop_spectral_entry(acvs, j, k, bw, w, window_);
          p.re[pos] = v.real();
          p.im[pos] = v.imag();
        }
        p.f_zero = flattop_spectral_entry(acvs, j, k, bw, 0.0, window_).real();
        p.f_pi = flattop_spectral_entry(acvs, j, k, bw, kPi, window_).real();
        p.r4_zero = fourth_moment_sum(acvs, j, k, bw, 0.0);
        p.r4_pi = fourth_moment_sum(acvs, j, k, bw, kPi);
      }
    }
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::size_t half_size() const noexcept { return half_; }
  [[nodiscard]] const Eigen::MatrixXi& bandwidths() const noexcept {
    return bandwidths_;
  }

  // Real and imaginary pilot values at half-grid position pos (s = pos + 1).
  [[nodiscard]] double real(std::size_t j, std::size_t k,
                            std::size_t pos) const {
    return j <= k ? pairs_[j * m_ + k].re[pos] : pairs_[k * m_ + j].re[pos];
  }
  [[nodiscard]] double imag(std::size_t j, std::size_t k,
                            std::size_t pos) const {
    return j <= k ? pairs_[j * m_ + k].im[pos] : -pairs_[k * m_ + j].im[pos];
  }

  [[nodiscard]] double value_at(std::size_t j, std::size_t k,
                                BoundaryFreq freq) const {
    const PairPilot& p = pair(j, k);
    return freq == BoundaryFreq::Zero ? p.f_zero : p.f_pi;
  }

  // (2*pi)^{-1} sum_h h^4 lambda(h/M) (gamma(h) + gamma(-h)) cos(h * theta)
  [[nodiscard]] double r4(std::size_t j, std::size_t k,
                          BoundaryFreq freq) const {
    const PairPilot& p = pair(j, k);
    return freq == BoundaryFreq::Zero ? p.r4_zero : p.r4_pi;
  }

  // Co-spectral defect f_jj f_kk - Re^2 - Im^2; identically zero on the
  // diagonal.
  [[nodiscard]] double defect(std::size_t j, std::size_t k,
                              std::size_t pos) const {
    const double rjk = real(j, k, pos);
    const double ijk = imag(j, k, pos);
    return real(j, j, pos) * real(k, k, pos) - rjk * rjk - ijk * ijk;
  }

 private:
  struct PairPilot {
    std::vector<double> re, im;
    double f_zero = 0.0, f_pi = 0.0;
    double r4_zero = 0.0, r4_pi = 0.0;
  };

  [[nodiscard]] const PairPilot& pair(std::size_t j, std::size_t k) const {
    return j <= k ? pairs_[j * m_ + k] : pairs_[k * m_ + j];
  }

  [[nodiscard]] double fourth_moment_sum(const AutocovSequence& acvs,
                                         std::size_t j, std::size_t k,
                                         std::size_t bw, double theta) const {
    const long support =
        std::min<long>(static_cast<long>(bw), static_cast<long>(n_));
    double acc = 0.0;
    for (long h = 1; h < support; ++h) {
      const double lam =
          window_(static_cast<double>(h) / static_cast<double>(bw));
      if (lam == 0.0) break;
      const double hh = static_cast<double>(h);
      acc += hh * hh * hh * hh * lam *
             (acvs.entry(j, k, h) + acvs.entry(j, k, -h)) *
             std::cos(hh * theta);
    }
    return acc / kTwoPi;
  }

  std::size_t n_, m_, half_;
  Eigen::MatrixXi bandwidths_;
  FlatTopWindow window_;
  std::vector<PairPilot> pairs_;
};

[[nodiscard]] inline PilotSpectrum pilot_from_flattop(
    const AutocovSequence& acvs, const EmpiricalRuleConfig& cfg = {}) {
  return {acvs, bandwidth_matrix(acvs, cfg), cfg.window};
}

// Analytic accuracy of the unweighted fit at one bandwidth fraction, with
// the design moments that produced it. A negative variance integrand is
// possible because the pilot need not be positive semidefinite; it is
// flagged rather than treated as an error.
struct MseComponents {
  double F0 = 0.0, F2 = 0.0, F4 = 0.0;  // variance integrand moments
  double G0 = 0.0, G2 = 0.0;            // bias integrand moments
  double c2 = 0.0, c4 = 0.0;            // regressor moments
  BoundaryFreq theta = BoundaryFreq::Zero;
  double delta = 0.0;
  std::size_t points = 0;  // M = floor(delta * n)
  double variance = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  bool negative_integrand = false;
};

// Direct evaluation of the analytic mean squared error from per-ordinate
// variance and bias integrands: A_s is the variance integrand
// 2 d_jk + 4 Re^2, G_s the pilot real part, f_theta the pilot value at the
// boundary. The variance prefactor keeps the continuous fraction delta so
// the objective stays strictly decreasing between design-size steps.
[[nodiscard]] inline MseComponents mse_from_design(
    const BoundaryDesign& design, const std::vector<double>& A,
    const std::vector<double>& G, double f_theta) {
  const std::size_t M = design.points;
  if (A.size() != M || G.size() != M) {
    throw error("bandwidth", "integrand length does not match the design");
  }
  MseComponents out;
  out.theta = design.freq;
  out.delta = design.delta;
  out.points = M;
  for (std::size_t i = 0; i < M; ++i) {
    const double x = design.x[i];
    out.c2 += x;
    out.c4 += x * x;
    out.F0 += A[i];
    out.F2 += x * A[i];
    out.F4 += x * x * A[i];
    out.G0 += G[i];
    out.G2 += x * G[i];
    if (A[i] < 0.0) out.negative_integrand = true;
  }
  const auto Md = static_cast<double>(M);
  out.c2 /= Md;
  out.c4 /= Md;
  out.F0 /= Md;
  out.F2 /= Md;
  out.F4 /= Md;
  out.G0 /= Md;
  out.G2 /= Md;
  const double denom = out.c4 - out.c2 * out.c2;
  out.variance = (out.c4 * out.c4 * out.F0 - 2.0 * out.c4 * out.c2 * out.F2 +
                  out.c2 * out.c2 * out.F4) /
                 (4.0 * denom * denom * design.delta *
                  static_cast<double>(design.n));
  out.bias = (out.c4 * out.G0 - out.c2 * out.G2) / denom - f_theta;
  out.mse = out.variance + out.bias * out.bias;
  return out;
}

[[nodiscard]] inline MseComponents mse_at_delta(const PilotSpectrum& pilot,
                                                std::size_t j, std::size_t k,
                                                BoundaryFreq freq,
                                                double delta) {
  const BoundaryDesign design = boundary_design(pilot.n(), freq, delta);
  std::vector<double> A, G;
  A.reserve(design.s.size());
  G.reserve(design.s.size());
  for (long s : design.s) {
    const std::size_t pos = half_grid_position(s);
    const double r = pilot.real(j, k, pos);
    A.push_back(2.0 * pilot.defect(j, k, pos) + 4.0 * r * r);
    G.push_back(r);
  }
  return mse_from_design(design, A, G, pilot.value_at(j, k, freq));
}

// Prefix-sum cache for one entry and boundary; evaluates the same objective
// as mse_at_delta in constant time per candidate delta.
class EntryMseProfile {
 public:
  EntryMseProfile(const PilotSpectrum& pilot, std::size_t j, std::size_t k,
                  BoundaryFreq freq)
      : EntryMseProfile(integrands(pilot, j, k), pilot_reals(pilot, j, k),
                        pilot.value_at(j, k, freq), pilot.n(), freq) {}

  // Raw form: A holds the variance integrand and G the bias integrand at
  // half-grid positions s = 1..floor(n/2), in ascending s.
  EntryMseProfile(std::vector<double> A, std::vector<double> G,
                  double f_theta, std::size_t n, BoundaryFreq freq)
      : n_(n), freq_(freq), f_theta_(f_theta) {
    const std::size_t half = n / 2;
    if (A.size() != half || G.size() != half) {
      throw error("bandwidth",
                  "integrand length does not match the half grid");
    }
    const double theta = boundary_value(freq);
    sx1_.assign(half + 1, 0.0);
    sx2_.assign(half + 1, 0.0);
    sA0_.assign(half + 1, 0.0);
    sA1_.assign(half + 1, 0.0);
    sA2_.assign(half + 1, 0.0);
    sG0_.assign(half + 1, 0.0);
    sG1_.assign(half + 1, 0.0);
    neg_.assign(half + 1, 0);
    for (std::size_t i = 0; i < half; ++i) {
      // Design order: outward from the boundary. At zero that is ascending
      // s; at pi it walks down from the top of the half grid.
      const std::size_t pos = (freq == BoundaryFreq::Zero) ? i : half - 1 - i;
      const double w =
          kTwoPi * static_cast<double>(pos + 1) / static_cast<double>(n_);
      const double d = theta - w;
      const double x = d * d;
      const double a = A[pos];
      const double g = G[pos];
      sx1_[i + 1] = sx1_[i] + x;
      sx2_[i + 1] = sx2_[i] + x * x;
      sA0_[i + 1] = sA0_[i] + a;
      sA1_[i + 1] = sA1_[i] + x * a;
      sA2_[i + 1] = sA2_[i] + x * x * a;
      sG0_[i + 1] = sG0_[i] + g;
      sG1_[i + 1] = sG1_[i] + x * g;
      neg_[i + 1] = neg_[i] + (a < 0.0 ? 1 : 0);
    }
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }

  [[nodiscard]] MseComponents at(double delta) const {
    const auto M = static_cast<std::size_t>(
        std::floor(delta * static_cast<double>(n_)));
    if (M < 3 || M + 1 > sx1_.size()) {
      throw error("bandwidth", "delta outside the evaluable range");
    }
    const auto Md = static_cast<double>(M);
    MseComponents out;
    out.theta = freq_;
    out.delta = delta;
    out.points = M;
    out.c2 = sx1_[M] / Md;
    out.c4 = sx2_[M] / Md;
    out.F0 = sA0_[M] / Md;
    out.F2 = sA1_[M] / Md;
    out.F4 = sA2_[M] / Md;
    out.G0 = sG0_[M] / Md;
    out.G2 = sG1_[M] / Md;
    out.negative_integrand = neg_[M] > 0;
    const double denom = out.c4 - out.c2 * out.c2;
    out.variance = (out.c4 * out.c4 * out.F0 -
                    2.0 * out.c4 * out.c2 * out.F2 +
                    out.c2 * out.c2 * out.F4) /
                   (4.0 * denom * denom * delta * static_cast<double>(n_));
    out.bias = (out.c4 * out.G0 - out.c2 * out.G2) / denom - f_theta_;
    out.mse = out.variance + out.bias * out.bias;
    return out;
  }

 private:
  [[nodiscard]] static std::vector<double> integrands(
      const PilotSpectrum& pilot, std::size_t j, std::size_t k) {
    std::vector<double> A(pilot.half_size());
    for (std::size_t pos = 0; pos < A.size(); ++pos) {
      const double r = pilot.real(j, k, pos);
      A[pos] = 2.0 * pilot.defect(j, k, pos) + 4.0 * r * r;
    }
    return A;
  }

  [[nodiscard]] static std::vector<double> pilot_reals(
      const PilotSpectrum& pilot, std::size_t j, std::size_t k) {
    std::vector<double> G(pilot.half_size());
    for (std::size_t pos = 0; pos < G.size(); ++pos) {
      G[pos] = pilot.real(j, k, pos);
    }
    return G;
  }

  std::size_t n_;
  BoundaryFreq freq_;
  double f_theta_;
  std::vector<double> sx1_, sx2_, sA0_, sA1_, sA2_, sG0_, sG1_;
  std::vector<int> neg_;
};

namespace detail {

// Coarse log-spaced grid scan followed by golden-section refinement around
// the best grid point; returns the best delta seen anywhere.
[[nodiscard]] inline std::pair<double, double> minimize_over_delta(
    const std::function<double(double)>& objective, double lo, double hi,
    const SearchConfig& cfg) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw error("bandwidth", "empty bandwidth search interval");
  }
  // Interpolation and the log/exp round trip can land a hair outside
  // [lo, hi]; every candidate must stay inside so floor(delta * n) cannot
  // drop below the smallest usable design.
  auto clamped = [lo, hi](double delta) {
    return std::min(std::max(delta, lo), hi);
  };
  double best_delta = lo;
  double best_value = objective(lo);
  auto consider = [&](double delta) {
    const double value = objective(delta);
    if (value < best_value) {
      best_value = value;
      best_delta = delta;
    }
  };

  if (cfg.grid_only) {
    const int P = std::max(cfg.exhaustive_points, 2);
    for (int i = 0; i < P; ++i) {
      consider(clamped(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(P - 1)));
    }
    return {best_delta, best_value};
  }

  const int G = std::max(cfg.grid_points, 2);
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<double> grid(static_cast<std::size_t>(G));
  std::size_t best_idx = 0;
  for (int i = 0; i < G; ++i) {
    const double delta = clamped(std::exp(
        llo +
        (lhi - llo) * static_cast<double>(i) / static_cast<double>(G - 1)));
    grid[static_cast<std::size_t>(i)] = delta;
    const double value = objective(delta);
    if (value < best_value) {
      best_value = value;
      best_delta = delta;
      best_idx = static_cast<std::size_t>(i);
    }
  }

  double a = grid[best_idx == 0 ? 0 : best_idx - 1];
  double b = grid[std::min<std::size_t>(best_idx + 1, grid.size() - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > cfg.tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
    if (fc < best_value) {
      best_value = fc;
      best_delta = c;
    }
    if (fd < best_value) {
      best_value = fd;
      best_delta = d;
    }
  }
  return {best_delta, best_value};
}

}  // namespace detail

struct DeltaChoice {
  double delta = 0.0;
  MseComponents components;
};

[[nodiscard]] inline DeltaChoice select_delta(const EntryMseProfile& profile,
                                              const SearchConfig& cfg = {}) {
  const double lo = resolved_delta_min(cfg, profile.n());
  const double hi = cfg.delta_max;
  if (!(hi > lo)) {
    throw error("bandwidth",
                "delta_max must exceed the resolved delta_min");
  }
  const auto [delta, value] = detail::minimize_over_delta(
      [&profile](double d) { return profile.at(d).mse; }, lo, hi, cfg);
  (void)value;
  return {delta, profile.at(delta)};
}

[[nodiscard]] inline DeltaChoice select_delta(const PilotSpectrum& pilot,
                                              std::size_t j, std::size_t k,
                                              BoundaryFreq freq,
                                              const SearchConfig& cfg = {}) {
  return select_delta(EntryMseProfile(pilot, j, k, freq), cfg);
}

// Asymptotic objective for the kernel-weighted fit: closed-form kernel
// moments replace the discrete design sums.
[[nodiscard]] inline MseComponents wls_mse_at_delta(
    const PilotSpectrum& pilot, std::size_t j, std::size_t k,
    BoundaryFreq freq, const OneSidedKernel& kernel, double delta) {
  const double K0 = kernel.moment(0), K2 = kernel.moment(2),
               K4 = kernel.moment(4), K6 = kernel.moment(6);
  const double Q0 = kernel.square_moment(0), Q2 = kernel.square_moment(2),
               Q4 = kernel.square_moment(4);
  const double den = K0 * K4 - K2 * K2;
  const double rjk = pilot.value_at(j, k, freq);
  const double spread = 2.0 * rjk * rjk + 2.0 * pilot.value_at(j, j, freq) *
                                              pilot.value_at(k, k, freq);
  const double var_shape =
      (K4 * K4 * Q0 - 2.0 * K4 * K2 * Q2 + K2 * K2 * Q4) / (den * den);
  const double band = kTwoPi * delta;
  const double bias_shape = (K4 * K4 - K6 * K2) / den;
  MseComponents out;
  out.theta = freq;
  out.delta = delta;
  out.points = static_cast<std::size_t>(
      std::floor(delta * static_cast<double>(pilot.n())));
  out.variance =
      spread * var_shape / (delta * static_cast<double>(pilot.n()));
  out.bias = pilot.r4(j, k, freq) / 24.0 * band * band * band * band *
             bias_shape;
  out.mse = out.variance + out.bias * out.bias;
  return out;
}

[[nodiscard]] inline DeltaChoice select_delta_wls(const PilotSpectrum& pilot,
                                                  std::size_t j,
                                                  std::size_t k,
                                                  BoundaryFreq freq,
                                                  const OneSidedKernel& kernel,
                                                  const SearchConfig& cfg = {}) {
  const double lo = resolved_delta_min(cfg, pilot.n());
  const double hi = cfg.delta_max;
  if (!(hi > lo)) {
    throw error("bandwidth",
                "delta_max must exceed the resolved delta_min");
  }
  auto objective = [&](double d) {
    return wls_mse_at_delta(pilot, j, k, freq, kernel, d).mse;
  };
  const auto [delta, value] =
      detail::minimize_over_delta(objective, lo, hi, cfg);
  (void)value;
  return {delta, wls_mse_at_delta(pilot, j, k, freq, kernel, delta)};
}

// Per-entry bandwidth fractions for a whole matrix, with the pilot and
// selection diagnostics callers may want to report.
struct DeltaSelection {
  Eigen::MatrixXd deltas;
  Eigen::MatrixXi pilot_bandwidths;
  std::vector<MseComponents> entry_components;  // row-major j * m + k
};

[[nodiscard]] inline DeltaSelection select_delta_matrix(
    const AutocovSequence& acvs, BoundaryFreq freq,
    const SearchConfig& cfg = {}, const EmpiricalRuleConfig& rule = {},
    const OneSidedKernel& kernel = {}) {
  const PilotSpectrum pilot = pilot_from_flattop(acvs, rule);
  const auto m = static_cast<Eigen::Index>(acvs.m());
  DeltaSelection out;
  out.deltas = Eigen::MatrixXd::Zero(m, m);
  out.pilot_bandwidths = pilot.bandwidths();
  out.entry_components.resize(acvs.m() * acvs.m());
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j; k < m; ++k) {
      DeltaChoice choice;
      if (kernel.shape == KernelShape::Uniform) {
        const EntryMseProfile profile(pilot, static_cast<std::size_t>(j),
                                      static_cast<std::size_t>(k), freq);
        choice = select_delta(profile, cfg);
      } else {
        choice = select_delta_wls(pilot, static_cast<std::size_t>(j),
                                  static_cast<std::size_t>(k), freq, kernel,
                                  cfg);
      }
      out.deltas(j, k) = choice.delta;
      out.deltas(k, j) = choice.delta;
      const std::size_t jj = static_cast<std::size_t>(j);
      const std::size_t kk = static_cast<std::size_t>(k);
      out.entry_components[jj * acvs.m() + kk] = choice.components;
      out.entry_components[kk * acvs.m() + jj] = choice.components;
    }
  }
  return out;
}

[[nodiscard]] inline DeltaSelection select_delta_matrix(
    const MultivariateSeries& series, BoundaryFreq freq,
    const SearchConfig& cfg = {}, const EmpiricalRuleConfig& rule = {},
    const OneSidedKernel& kernel = {},
    Centering centering = Centering::Centered) {
  series.require_estimable();
  const AutocovSequence acvs(series, centering);
  return select_delta_matrix(acvs, freq, cfg, rule, kernel);
}

}  // namespace specbound
