#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "specbound/bandwidth.hpp"
#include "specbound/boundary_fit.hpp"
#include "specbound/error.hpp"
#include "specbound/flattop.hpp"
#include "specbound/psd.hpp"
#include "specbound/series.hpp"

namespace specbound {

enum class Method { LocalQuadratic, FlatTop };

[[nodiscard]] inline const char* method_label(Method method) noexcept {
  return method == Method::LocalQuadratic ? "lq" : "flattop";
}

struct EstimateOptions {
  Method method = Method::LocalQuadratic;
  BoundaryFreq freq = BoundaryFreq::Zero;
  OneSidedKernel kernel{};
  SearchConfig search{};
  EmpiricalRuleConfig rule{};
  Centering centering = Centering::Centered;
  bool apply_psd = true;
  PsdPolicy psd{};  // ClampZero unless configured otherwise
  // Skip data-based selection and use these fractions directly.
  std::optional<Eigen::MatrixXd> delta_override;
};

struct EstimateResult {
  Eigen::MatrixXd f;             // estimate after any correction
  Eigen::MatrixXd f_raw;         // estimate before correction
  Eigen::MatrixXd deltas;        // bandwidth fractions used
  Eigen::MatrixXi design_sizes;  // frequencies (or lags) per entry
  Eigen::MatrixXd curvature;     // fitted curvature, zero for the lag window
  std::vector<MseComponents> selection;  // empty when selection was skipped
};

// Boundary spectral matrix by either method, with data-based bandwidths
// unless overridden.
[[nodiscard]] inline EstimateResult estimate_boundary(
    const MultivariateSeries& series, const EstimateOptions& opt) {
  series.require_estimable();
  const std::size_t n = series.n();
  const auto m = static_cast<Eigen::Index>(series.m());
  const AutocovSequence acvs(series, opt.centering);

  EstimateResult out;
  out.design_sizes = Eigen::MatrixXi::Zero(m, m);
  out.curvature = Eigen::MatrixXd::Zero(m, m);

  if (opt.method == Method::LocalQuadratic) {
    if (opt.delta_override.has_value()) {
      out.deltas = *opt.delta_override;
    } else {
      DeltaSelection sel =
          select_delta_matrix(acvs, opt.freq, opt.search, opt.rule,
                              opt.kernel);
      out.deltas = sel.deltas;
      out.selection = std::move(sel.entry_components);
    }
    // The half grid is computed on explicitly mean-adjusted data when the
    // caller assumes a zero mean; the periodogram itself always centers.
    const PeriodogramOrdinates half = half_grid_ordinates(series);
    out.f_raw = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = j; k < m; ++k) {
        if (out.deltas(j, k) != out.deltas(k, j)) {
          throw error("boundary-lq", "delta matrix must be symmetric");
        }
        const BoundaryDesign design =
            boundary_design(n, opt.freq, out.deltas(j, k));
        const QuadFit fit =
            lq_entry_fit(half, static_cast<std::size_t>(j),
                         static_cast<std::size_t>(k), design, opt.kernel);
        out.f_raw(j, k) = fit.intercept;
        out.f_raw(k, j) = fit.intercept;
        out.curvature(j, k) = fit.curvature;
        out.curvature(k, j) = fit.curvature;
        out.design_sizes(j, k) = static_cast<int>(fit.points);
        out.design_sizes(k, j) = static_cast<int>(fit.points);
      }
    }
  } else {
    Eigen::MatrixXi bw;
    if (opt.delta_override.has_value()) {
      bw = Eigen::MatrixXi(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
          bw(j, k) = static_cast<int>(std::floor(
              (*opt.delta_override)(j, k) * static_cast<double>(n)));
          if (bw(j, k) < 1) {
            throw error("flattop", "bandwidth override below one lag");
          }
        }
      }
    } else {
      bw = bandwidth_matrix(acvs, opt.rule);
    }
    out.f_raw =
        flattop_spectral_matrix(acvs, bw, boundary_value(opt.freq),
                                opt.rule.window)
            .real();
    out.design_sizes = bw;
    out.deltas = bw.cast<double>() / static_cast<double>(n);
  }

  out.f = opt.apply_psd ? psd_correct(out.f_raw, opt.psd, n) : out.f_raw;
  return out;
}

struct LongRunOptions {
  Method method = Method::LocalQuadratic;
  OneSidedKernel kernel{};
  SearchConfig search{};
  EmpiricalRuleConfig rule{};
  double eps = 0.01;    // floor eps/n keeps the estimate invertible
  bool rescale = true;  // equalize component scales before selection
};

struct LongRunCov {
  Eigen::MatrixXd omega;         // 2*pi times the corrected f(0)
  Eigen::MatrixXd fhat0;         // corrected f(0) on the original scale
  Eigen::MatrixXd deltas;        // bandwidth fractions used
  Eigen::MatrixXi design_sizes;  // per-entry design sizes
  PsdPolicy policy;
  Method method = Method::LocalQuadratic;
  bool rescaled = true;
};

// Long-run covariance of the mean: rescale components to unit variance,
// estimate the spectral matrix at frequency zero on the rescaled data with
// bandwidths selected there, clamp it positive definite, then undo the
// scaling and multiply by 2*pi.
[[nodiscard]] inline LongRunCov longrun_covariance(
    const MultivariateSeries& series, const LongRunOptions& opt = {}) {
  series.require_estimable();
  const std::size_t n = series.n();
  const std::size_t m = series.m();
  const auto mi = static_cast<Eigen::Index>(m);

  EstimateOptions est;
  est.method = opt.method;
  est.freq = BoundaryFreq::Zero;
  est.kernel = opt.kernel;
  est.search = opt.search;
  est.rule = opt.rule;
  est.apply_psd = true;
  est.psd = PsdPolicy{PsdPolicyKind::ClampEps, opt.eps};

  LongRunCov out;
  out.policy = est.psd;
  out.method = opt.method;
  out.rescaled = opt.rescale;

  if (!opt.rescale) {
    est.centering = Centering::Centered;
    const EstimateResult res = estimate_boundary(series, est);
    out.fhat0 = res.f;
    out.deltas = res.deltas;
    out.design_sizes = res.design_sizes;
    out.omega = kTwoPi * out.fhat0;
    return out;
  }

  const Eigen::VectorXd mean = sample_mean(series);
  Eigen::VectorXd scale(mi);
  for (std::size_t j = 0; j < m; ++j) {
    const double gamma0 = sample_autocov(series, 0)(
        static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    if (!(gamma0 > 0.0)) {
      throw error("psd", "zero-variance component " + series.names()[j]);
    }
    scale(static_cast<Eigen::Index>(j)) = std::sqrt(gamma0);
  }

  std::vector<double> rescaled(n * m);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto ji = static_cast<Eigen::Index>(j);
      rescaled[t * m + j] = (series(t, j) - mean(ji)) / scale(ji);
    }
  }
  const MultivariateSeries y(n, m, std::move(rescaled), series.names());

  // y is centered by construction, so its mean is not estimated again.
  est.centering = Centering::AssumeZeroMean;
  const EstimateResult res = estimate_boundary(y, est);

  out.fhat0 = scale.asDiagonal() * res.f * scale.asDiagonal();
  out.fhat0 = 0.5 * (out.fhat0 + out.fhat0.transpose()).eval();
  out.deltas = res.deltas;
  out.design_sizes = res.design_sizes;
  out.omega = kTwoPi * out.fhat0;
  return out;
}

}  // namespace specbound
