// Wald test of a hypothesized mean vector against the bundled series. The
// long-run covariance comes from the local quadratic estimate at frequency
// zero, so the test accounts for serial dependence.
//
// Build via the sample_mean_test target, then run:
//   ./build/sample_mean_test samples/dgp1_n500.csv 0 0

#include <cstdio>
#include <cstdlib>
#include <string>

#include <specbound/csv.hpp>
#include <specbound/inference.hpp>

int main(int argc, char** argv) {
  const std::string path = (argc > 1) ? argv[1] : "samples/dgp1_n500.csv";
  const specbound::MultivariateSeries series =
      specbound::read_series_csv_file(path);

  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(series.m()));
  for (int j = 0; j + 2 < argc && j < static_cast<int>(series.m()); ++j) {
    mu0(j) = std::strtod(argv[j + 2], nullptr);
  }

  const Eigen::VectorXd mean = specbound::sample_mean(series);
  std::printf("sample mean:");
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    std::printf(" %.6f", mean(j));
  }
  std::printf("\nnull mean:  ");
  for (Eigen::Index j = 0; j < mu0.size(); ++j) {
    std::printf(" %.6f", mu0(j));
  }

  const specbound::WaldResult res = specbound::wald_test(series, mu0);
  std::printf("\nWald statistic = %.6f, df = %zu, p-value = %.6f\n",
              res.statistic, res.df, res.pvalue);
  return 0;
}
