// Estimate the spectral density matrix of the bundled two-component series
// at both boundary frequencies, once with the local quadratic fit and once
// with the flat-top lag window, and print the results side by side.
//
// Build via the sample_boundary_estimate target, then run:
//   ./build/sample_boundary_estimate samples/dgp1_n500.csv

#include <cstdio>
#include <string>

#include <specbound/csv.hpp>
#include <specbound/estimator.hpp>

int main(int argc, char** argv) {
  const std::string path = (argc > 1) ? argv[1] : "samples/dgp1_n500.csv";
  const specbound::MultivariateSeries series =
      specbound::read_series_csv_file(path);
  std::printf("series: n=%zu, m=%zu\n", series.n(), series.m());

  for (specbound::BoundaryFreq freq :
       {specbound::BoundaryFreq::Zero, specbound::BoundaryFreq::Pi}) {
    const char* name = freq == specbound::BoundaryFreq::Zero ? "0" : "pi";
    for (specbound::Method method : {specbound::Method::LocalQuadratic,
                                     specbound::Method::FlatTop}) {
      specbound::EstimateOptions opt;
      opt.method = method;
      opt.freq = freq;
      const specbound::EstimateResult res =
          specbound::estimate_boundary(series, opt);
      std::printf("\nf(%s), method %s:\n", name,
                  specbound::method_label(method));
      for (Eigen::Index j = 0; j < res.f.rows(); ++j) {
        for (Eigen::Index k = 0; k < res.f.cols(); ++k) {
          std::printf("  % .6f", res.f(j, k));
        }
        std::printf("\n");
      }
      if (method == specbound::Method::LocalQuadratic) {
        std::printf("  bandwidth fractions: %.4f %.4f %.4f\n",
                    res.deltas(0, 0), res.deltas(0, 1), res.deltas(1, 1));
      }
    }
  }
  return 0;
}
