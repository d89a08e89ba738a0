#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "specbound/error.hpp"
#include "specbound/rng.hpp"
#include "specbound/series.hpp"

namespace specbound {

enum class DgpKind { Dgp1, Dgp2 };

struct DgpSpec {
  DgpKind kind = DgpKind::Dgp1;
  std::size_t n = 100;
  std::size_t burnin = 200;  // recursions start at zero and warm up
};

// Two bivariate Gaussian test processes.
//
// Process 1: component 1 is AR(1) with coefficient .75; component 2 is the
// moving average 2 (Z_t + Z_{t-1}) of an independent innovation stream.
//
// Process 2: component 1 is the difference Z_t - Z_{t-1}; component 2 adds
// the lead-7 value of component 1 to an AR(1) with coefficient -.75 driven
// by the second innovation stream. Seven extra innovations cover the lead.
//
// Per time step the two innovations are drawn in component order, which
// pins the exact output for a given stream.
[[nodiscard]] inline MultivariateSeries simulate(const DgpSpec& spec,
                                                 RngStream& rng) {
  if (spec.n < 50) {
    throw error("simharness",
                "simulation needs n >= 50, got " + std::to_string(spec.n));
  }
  const std::size_t n = spec.n;
  std::vector<double> values(n * 2);

  if (spec.kind == DgpKind::Dgp1) {
    const std::size_t total = spec.burnin + n;
    double x1 = 0.0;
    double z2_prev = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      const double z1 = rng.next_gaussian();
      const double z2 = rng.next_gaussian();
      x1 = 0.75 * x1 + z1;
      const double x2 = 2.0 * (z2 + z2_prev);
      z2_prev = z2;
      if (t >= spec.burnin) {
        values[(t - spec.burnin) * 2] = x1;
        values[(t - spec.burnin) * 2 + 1] = x2;
      }
    }
    return {n, 2, std::move(values)};
  }

  const std::size_t total = spec.burnin + n + 7;
  std::vector<double> x1(total), v(total);
  double z1_prev = 0.0;
  double v_prev = 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    const double z1 = rng.next_gaussian();
    const double z2 = rng.next_gaussian();
    x1[t] = z1 - z1_prev;
    z1_prev = z1;
    v[t] = -0.75 * v_prev + z2;
    v_prev = v[t];
  }
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t src = spec.burnin + t;
    values[t * 2] = x1[src];
    values[t * 2 + 1] = x1[src + 7] + v[src];
  }
  return {n, 2, std::move(values)};
}

// Closed-form spectral density matrices of the two processes.
[[nodiscard]] inline Eigen::MatrixXcd true_spectrum(DgpKind kind, double w) {
  Eigen::MatrixXcd f(2, 2);
  const double cw = std::cos(w);
  if (kind == DgpKind::Dgp1) {
    const double ar = 1.0 - 1.5 * cw + 0.5625;  // |1 - .75 e^{-iw}|^2
    const double ma = 2.0 + 2.0 * cw;           // |1 + e^{-iw}|^2
    f(0, 0) = 1.0 / (kTwoPi * ar);
    f(1, 1) = 4.0 * ma / kTwoPi;
    f(0, 1) = 0.0;
    f(1, 0) = 0.0;
    return f;
  }
  const double diff = 2.0 - 2.0 * cw;           // |1 - e^{-iw}|^2
  const double ar = 1.0 + 1.5 * cw + 0.5625;    // |1 + .75 e^{-iw}|^2
  const std::complex<double> lead(std::cos(7.0 * w), -std::sin(7.0 * w));
  f(0, 0) = diff / kTwoPi;
  f(1, 1) = (diff + 1.0 / ar) / kTwoPi;
  f(0, 1) = lead * diff / kTwoPi;
  f(1, 0) = std::conj(f(0, 1));
  return f;
}

}  // namespace specbound
