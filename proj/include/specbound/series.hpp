#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "specbound/error.hpp"

namespace specbound {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// n observations of an m-dimensional real series; rows are time points.
class MultivariateSeries {
 public:
  MultivariateSeries(std::size_t n, std::size_t m,
                     std::vector<double> values,
                     std::vector<std::string> names = {})
      : n_(n), m_(m), values_(std::move(values)), names_(std::move(names)) {
    if (n_ == 0 || m_ == 0 || values_.size() != n_ * m_) {
      throw error("series-core", "series dimensions do not match data size");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw error("series-core", "series contains a non-finite value");
      }
    }
    if (names_.empty()) {
      names_.reserve(m_);
      for (std::size_t j = 0; j < m_; ++j) {
        names_.push_back("x" + std::to_string(j + 1));
      }
    } else if (names_.size() != m_) {
      throw error("series-core", "expected one name per component");
    }
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] double operator()(std::size_t t, std::size_t j) const {
    return values_[t * m_ + j];
  }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept {
    return names_;
  }

  // Estimation operations need enough Fourier frequencies for a quadratic
  // fit at both boundaries.
  void require_estimable() const {
    if (n_ < 8) {
      throw error("series-core",
                  "need at least 8 observations for boundary estimation, got " +
                      std::to_string(n_));
    }
  }

 private:
  std::size_t n_, m_;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

[[nodiscard]] inline Eigen::VectorXd sample_mean(
    const MultivariateSeries& series) {
  const std::size_t n = series.n(), m = series.m();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < m; ++j) {
      mean(static_cast<Eigen::Index>(j)) += series(t, j);
    }
  }
  return mean / static_cast<double>(n);
}

enum class Centering {
  Centered,        // subtract the sample mean (the standard convention)
  AssumeZeroMean,  // trust a known zero mean; used by the simulation harness
};

// Sample cross-covariances gamma(h), computed lazily up to the largest lag a
// caller has asked for. gamma(-h) = gamma(h)^T and gamma(h) = 0 for |h| >= n.
// Lazy growth is not synchronized: share across threads only after calling
// ensure() for every lag that will be read.
class AutocovSequence {
 public:
  AutocovSequence(const MultivariateSeries& series,
                  Centering centering = Centering::Centered)
      : n_(series.n()), m_(series.m()), data_(n_ * m_) {
    Eigen::VectorXd mean = (centering == Centering::Centered)
                               ? sample_mean(series)
                               : Eigen::VectorXd::Zero(
                                     static_cast<Eigen::Index>(m_));
    for (std::size_t t = 0; t < n_; ++t) {
      for (std::size_t j = 0; j < m_; ++j) {
        data_[t * m_ + j] =
            series(t, j) - mean(static_cast<Eigen::Index>(j));
      }
    }
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }

  void ensure(std::size_t max_lag) const {
    if (max_lag >= n_) max_lag = n_ - 1;
    while (lags_.size() <= max_lag) {
      lags_.push_back(compute_lag(lags_.size()));
    }
  }

  // gamma_jk(h); transpose rule for negative h, zero beyond |h| >= n.
  [[nodiscard]] double entry(std::size_t j, std::size_t k, long h) const {
    if (h < 0) return entry(k, j, -h);
    if (static_cast<std::size_t>(h) >= n_) return 0.0;
    ensure(static_cast<std::size_t>(h));
    return lags_[static_cast<std::size_t>(h)](static_cast<Eigen::Index>(j),
                                              static_cast<Eigen::Index>(k));
  }

  [[nodiscard]] Eigen::MatrixXd at(long h) const {
    const auto mi = static_cast<Eigen::Index>(m_);
    if (std::abs(h) >= static_cast<long>(n_)) {
      return Eigen::MatrixXd::Zero(mi, mi);
    }
    if (h < 0) return at(-h).transpose();
    ensure(static_cast<std::size_t>(h));
    return lags_[static_cast<std::size_t>(h)];
  }

 private:
  [[nodiscard]] Eigen::MatrixXd compute_lag(std::size_t h) const {
    const auto mi = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(mi, mi);
    for (std::size_t t = 0; t + h < n_; ++t) {
      for (std::size_t j = 0; j < m_; ++j) {
        const double lead = data_[(t + h) * m_ + j];
        for (std::size_t k = 0; k < m_; ++k) {
          g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
              lead * data_[t * m_ + k];
        }
      }
    }
    return g / static_cast<double>(n_);
  }

  std::size_t n_, m_;
  std::vector<double> data_;
  mutable std::vector<Eigen::MatrixXd> lags_;
};

[[nodiscard]] inline Eigen::MatrixXd sample_autocov(
    const MultivariateSeries& series, long h,
    Centering centering = Centering::Centered) {
  return AutocovSequence(series, centering).at(h);
}

// The index set J_n of n consecutive integers underlying the Fourier
// frequencies w_s = 2*pi*s/n.
struct FourierGrid {
  std::size_t n = 0;
  std::vector<long> indices;
  std::vector<double> freqs;
};

[[nodiscard]] inline FourierGrid fourier_frequencies(std::size_t n) {
  if (n < 2) {
    throw error("series-core", "Fourier grid needs n >= 2");
  }
  FourierGrid grid;
  grid.n = n;
  const long lo = (n % 2 == 0) ? -(static_cast<long>(n) / 2) + 1
                               : -(static_cast<long>(n) - 1) / 2;
  for (long s = lo; s < lo + static_cast<long>(n); ++s) {
    grid.indices.push_back(s);
    grid.freqs.push_back(kTwoPi * static_cast<double>(s) /
                         static_cast<double>(n));
  }
  return grid;
}

namespace detail {

// DFT of the centered data at one frequency: d_j(w) = sum_t xc(t,j) e^{-iwt},
// with time indexed t = 1..n. The phase convention cancels in d d*.
[[nodiscard]] inline Eigen::VectorXcd centered_dft(
    const MultivariateSeries& series, const Eigen::VectorXd& mean, double w) {
  const std::size_t n = series.n(), m = series.m();
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
  const std::complex<double> step(std::cos(w), -std::sin(w));
  std::complex<double> phase = step;  // e^{-iw * 1}
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < m; ++j) {
      d(static_cast<Eigen::Index>(j)) +=
          (series(t, j) - mean(static_cast<Eigen::Index>(j))) * phase;
    }
    phase *= step;
  }
  return d;
}

}  // namespace detail

// Mean-centered periodogram I(w) = (2*pi*n)^{-1} d(w) d(w)*; I(0) = 0 by
// construction.
[[nodiscard]] inline Eigen::MatrixXcd periodogram(
    const MultivariateSeries& series, double w) {
  const Eigen::VectorXd mean = sample_mean(series);
  const Eigen::VectorXcd d = detail::centered_dft(series, mean, w);
  return (d * d.adjoint()) / (kTwoPi * static_cast<double>(series.n()));
}

// Real part of the cross-periodogram entry (j, k); equals (I_jk + I_kj)/2.
[[nodiscard]] inline double real_cross_periodogram(
    const MultivariateSeries& series, std::size_t j, std::size_t k, double w) {
  if (j >= series.m() || k >= series.m()) {
    throw error("series-core", "component index out of range");
  }
  const Eigen::VectorXd mean = sample_mean(series);
  const Eigen::VectorXcd d = detail::centered_dft(series, mean, w);
  const std::complex<double> cross =
      d(static_cast<Eigen::Index>(j)) *
      std::conj(d(static_cast<Eigen::Index>(k)));
  return cross.real() / (kTwoPi * static_cast<double>(series.n()));
}

// Real cross-periodogram ordinates at a list of Fourier indices, computed
// once and queried per entry; the local quadratic fits read prefixes or
// suffixes of the half grid s = 1..floor(n/2).
class PeriodogramOrdinates {
 public:
  PeriodogramOrdinates(const MultivariateSeries& series,
                       std::vector<long> s_indices)
      : n_(series.n()), m_(series.m()), s_(std::move(s_indices)) {
    const Eigen::VectorXd mean = sample_mean(series);
    dft_.reserve(s_.size());
    for (long s : s_) {
      const double w = kTwoPi * static_cast<double>(s) /
                       static_cast<double>(n_);
      dft_.push_back(detail::centered_dft(series, mean, w));
    }
  }

  [[nodiscard]] const std::vector<long>& indices() const noexcept {
    return s_;
  }

  // Real part of I_jk at the i-th stored ordinate.
  [[nodiscard]] double real(std::size_t j, std::size_t k,
                            std::size_t i) const {
    const std::complex<double> cross =
        dft_[i](static_cast<Eigen::Index>(j)) *
        std::conj(dft_[i](static_cast<Eigen::Index>(k)));
    return cross.real() / (kTwoPi * static_cast<double>(n_));
  }

 private:
  std::size_t n_, m_;
  std::vector<long> s_;
  std::vector<Eigen::VectorXcd> dft_;
};

}  // namespace specbound
