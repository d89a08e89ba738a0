// Command-line front end: boundary spectral estimation, long-run covariance,
// a Wald test of the mean, and the Monte Carlo harness over the two built-in
// test processes. Input series arrive as CSV (header of component names, one
// row per time point); results leave as JSON or CSV on stdout or in a file.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <specbound/csv.hpp>
#include <specbound/estimator.hpp>
#include <specbound/inference.hpp>
#include <specbound/mc.hpp>
#include <specbound/simulate.hpp>

namespace {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json matrix_json(const Eigen::MatrixXd& a) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(a(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json matrix_json(const Eigen::MatrixXi& a) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(a(j, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string entry_label(Eigen::Index j, Eigen::Index k) {
  return std::to_string(j + 1) + std::to_string(k + 1);
}

// The one supported environment override: a directory that relative output
// paths are resolved against.
std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("SPECBOUND_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  std::string base(dir);
  if (base.back() != '/') base += '/';
  return base + path;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const std::string resolved = resolve_output_path(path);
  std::ofstream out(resolved);
  if (!out) {
    throw specbound::error("cli", "cannot write output file: " + resolved);
  }
  out << text;
  if (!out.good()) {
    throw specbound::error("cli", "failed writing output file: " + resolved);
  }
}

struct FreqChoice {
  bool boundary = true;
  specbound::BoundaryFreq freq = specbound::BoundaryFreq::Zero;
  double radians = 0.0;
};

FreqChoice parse_freq(const std::string& text) {
  FreqChoice out;
  if (text == "0") {
    out.freq = specbound::BoundaryFreq::Zero;
    out.radians = 0.0;
    return out;
  }
  if (text == "pi") {
    out.freq = specbound::BoundaryFreq::Pi;
    out.radians = specbound::kPi;
    return out;
  }
  double w = 0.0;
  try {
    std::size_t used = 0;
    w = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw specbound::error(
        "cli", "cannot parse frequency '" + text + "': use 0, pi, or radians");
  }
  if (!(w >= 0.0) || !(w <= specbound::kPi)) {
    throw specbound::error("cli",
                           "frequency must lie in [0, pi], got " + text);
  }
  if (w == 0.0) {
    out.freq = specbound::BoundaryFreq::Zero;
  } else if (w == specbound::kPi) {
    out.freq = specbound::BoundaryFreq::Pi;
  } else {
    out.boundary = false;
  }
  out.radians = w;
  return out;
}

specbound::Method parse_method(const std::string& text) {
  if (text == "lq") return specbound::Method::LocalQuadratic;
  if (text == "flattop") return specbound::Method::FlatTop;
  throw specbound::error("cli", "unknown method '" + text +
                                    "': use lq or flattop");
}

specbound::OneSidedKernel parse_kernel(const std::string& text) {
  if (text == "uniform") return {specbound::KernelShape::Uniform};
  if (text == "triangular") return {specbound::KernelShape::Triangular};
  throw specbound::error("cli", "unknown kernel '" + text +
                                    "': use uniform or triangular");
}

specbound::PsdPolicy parse_psd(const std::string& text, double eps) {
  if (text == "clampzero") return {specbound::PsdPolicyKind::ClampZero, eps};
  if (text == "clampeps") return {specbound::PsdPolicyKind::ClampEps, eps};
  throw specbound::error("cli", "unknown psd policy '" + text +
                                    "': use clampzero or clampeps");
}

// Flags shared by every subcommand that reads a series and tunes the
// bandwidth search.
struct CommonOpts {
  std::string input;
  std::string output;
  std::string format;
  std::string method = "lq";
  std::string kernel = "uniform";
  double delta_min = 0.0;
  double delta_max = 0.35;
  int grid_points = 40;
  double tol = 1e-4;
  bool grid_only = false;
};

void add_common(CLI::App* cmd, CommonOpts* opts, const char* default_format) {
  opts->format = default_format;
  cmd->add_option("-i,--input", opts->input, "input series CSV")
      ->required();
  cmd->add_option("-o,--output", opts->output,
                  "output file (stdout when omitted)");
  cmd->add_option("--format", opts->format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--method", opts->method, "estimator: lq or flattop");
  cmd->add_option("--kernel", opts->kernel,
                  "fit weights: uniform or triangular");
  cmd->add_option("--delta-min", opts->delta_min,
                  "lower end of the bandwidth fraction search");
  cmd->add_option("--delta-max", opts->delta_max,
                  "upper end of the bandwidth fraction search");
  cmd->add_option("--grid-points", opts->grid_points,
                  "coarse grid size for the search");
  cmd->add_option("--tol", opts->tol, "refinement tolerance");
  cmd->add_flag("--grid-only", opts->grid_only,
                "skip refinement, scan a dense grid");
}

specbound::SearchConfig search_from(const CommonOpts& opts) {
  specbound::SearchConfig cfg;
  cfg.delta_min = opts.delta_min;
  cfg.delta_max = opts.delta_max;
  cfg.grid_points = opts.grid_points;
  cfg.tol = opts.tol;
  cfg.grid_only = opts.grid_only;
  return cfg;
}

ordered_json search_json(const specbound::SearchConfig& cfg) {
  ordered_json out;
  out["delta_min"] = cfg.delta_min;
  out["delta_max"] = cfg.delta_max;
  out["grid_points"] = cfg.grid_points;
  out["tol"] = cfg.tol;
  out["grid_only"] = cfg.grid_only;
  return out;
}

int run_estimate(const CommonOpts& opts, const std::string& freq_text,
                 const std::string& psd_text, double eps,
                 std::optional<double> delta_override) {
  const specbound::MultivariateSeries series =
      specbound::read_series_csv_file(opts.input);
  const FreqChoice freq = parse_freq(freq_text);
  const specbound::Method method = parse_method(opts.method);

  if (!freq.boundary) {
    if (method != specbound::Method::FlatTop) {
      throw specbound::error(
          "cli", "interior frequencies need --method flattop; the quadratic "
                 "fit is a boundary estimator");
    }
    series.require_estimable();
    const specbound::AutocovSequence acvs(series);
    const Eigen::MatrixXi bw = specbound::bandwidth_matrix(acvs);
    const Eigen::MatrixXcd f =
        specbound::flattop_spectral_matrix(acvs, bw, freq.radians);
    if (opts.format == "csv") {
      std::string text = "entry,f_re,f_im,bandwidth\n";
      for (Eigen::Index j = 0; j < f.rows(); ++j) {
        for (Eigen::Index k = j; k < f.cols(); ++k) {
          text += entry_label(j, k) + "," + format_double(f(j, k).real()) +
                  "," + format_double(f(j, k).imag()) + "," +
                  std::to_string(bw(j, k)) + "\n";
        }
      }
      write_output(text, opts.output);
      return 0;
    }
    ordered_json doc;
    doc["command"] = "estimate";
    doc["method"] = "flattop";
    doc["freq"] = freq.radians;
    doc["n"] = series.n();
    doc["names"] = series.names();
    doc["f_re"] = matrix_json(Eigen::MatrixXd(f.real()));
    doc["f_im"] = matrix_json(Eigen::MatrixXd(f.imag()));
    doc["bandwidths"] = matrix_json(bw);
    write_output(doc.dump(2) + "\n", opts.output);
    return 0;
  }

  specbound::EstimateOptions est;
  est.method = method;
  est.freq = freq.freq;
  est.kernel = parse_kernel(opts.kernel);
  est.search = search_from(opts);
  est.psd = parse_psd(psd_text, eps);
  if (delta_override.has_value()) {
    const auto m = static_cast<Eigen::Index>(series.m());
    est.delta_override = Eigen::MatrixXd::Constant(m, m, *delta_override);
  }
  const specbound::EstimateResult res =
      specbound::estimate_boundary(series, est);

  if (opts.format == "csv") {
    std::string text = "entry,f,f_raw,delta,design_size,curvature\n";
    for (Eigen::Index j = 0; j < res.f.rows(); ++j) {
      for (Eigen::Index k = j; k < res.f.cols(); ++k) {
        text += entry_label(j, k) + "," + format_double(res.f(j, k)) + "," +
                format_double(res.f_raw(j, k)) + "," +
                format_double(res.deltas(j, k)) + "," +
                std::to_string(res.design_sizes(j, k)) + "," +
                format_double(res.curvature(j, k)) + "\n";
      }
    }
    write_output(text, opts.output);
    return 0;
  }

  ordered_json doc;
  doc["command"] = "estimate";
  doc["method"] = specbound::method_label(est.method);
  doc["freq"] = (freq.freq == specbound::BoundaryFreq::Zero) ? "0" : "pi";
  doc["n"] = series.n();
  doc["names"] = series.names();
  doc["f"] = matrix_json(res.f);
  doc["f_raw"] = matrix_json(res.f_raw);
  doc["deltas"] = matrix_json(res.deltas);
  doc["design_sizes"] = matrix_json(res.design_sizes);
  doc["curvature"] = matrix_json(res.curvature);
  doc["psd"] = ordered_json{
      {"policy", psd_text},
      {"eps", est.psd.kind == specbound::PsdPolicyKind::ClampEps
                  ? ordered_json(est.psd.eps)
                  : ordered_json(nullptr)}};
  doc["search"] = search_json(est.search);
  write_output(doc.dump(2) + "\n", opts.output);
  return 0;
}

int run_longrun(const CommonOpts& opts, double eps, bool no_rescale) {
  const specbound::MultivariateSeries series =
      specbound::read_series_csv_file(opts.input);
  specbound::LongRunOptions lr;
  lr.method = parse_method(opts.method);
  lr.kernel = parse_kernel(opts.kernel);
  lr.search = search_from(opts);
  lr.eps = eps;
  lr.rescale = !no_rescale;
  const specbound::LongRunCov cov = specbound::longrun_covariance(series, lr);

  if (opts.format == "csv") {
    std::string text = "entry,omega,fhat0,delta,design_size\n";
    for (Eigen::Index j = 0; j < cov.omega.rows(); ++j) {
      for (Eigen::Index k = j; k < cov.omega.cols(); ++k) {
        text += entry_label(j, k) + "," + format_double(cov.omega(j, k)) +
                "," + format_double(cov.fhat0(j, k)) + "," +
                format_double(cov.deltas(j, k)) + "," +
                std::to_string(cov.design_sizes(j, k)) + "\n";
      }
    }
    write_output(text, opts.output);
    return 0;
  }

  ordered_json doc;
  doc["command"] = "longrun";
  doc["method"] = specbound::method_label(cov.method);
  doc["n"] = series.n();
  doc["names"] = series.names();
  doc["rescaled"] = cov.rescaled;
  doc["eps"] = lr.eps;
  doc["omega"] = matrix_json(cov.omega);
  doc["fhat0"] = matrix_json(cov.fhat0);
  doc["deltas"] = matrix_json(cov.deltas);
  doc["design_sizes"] = matrix_json(cov.design_sizes);
  doc["search"] = search_json(lr.search);
  write_output(doc.dump(2) + "\n", opts.output);
  return 0;
}

int run_wald(const CommonOpts& opts, const std::vector<double>& mu0_values,
             double eps, bool no_rescale) {
  const specbound::MultivariateSeries series =
      specbound::read_series_csv_file(opts.input);
  Eigen::VectorXd mu0(static_cast<Eigen::Index>(mu0_values.size()));
  for (std::size_t i = 0; i < mu0_values.size(); ++i) {
    mu0(static_cast<Eigen::Index>(i)) = mu0_values[i];
  }
  specbound::WaldOptions wo;
  wo.method = parse_method(opts.method);
  wo.kernel = parse_kernel(opts.kernel);
  wo.search = search_from(opts);
  wo.eps = eps;
  wo.rescale = !no_rescale;
  const specbound::WaldResult res = specbound::wald_test(series, mu0, wo);

  if (opts.format == "csv") {
    std::string text = "statistic,df,pvalue\n";
    text += format_double(res.statistic) + "," + std::to_string(res.df) +
            "," + format_double(res.pvalue) + "\n";
    write_output(text, opts.output);
    return 0;
  }

  const Eigen::VectorXd mean = specbound::sample_mean(series);
  ordered_json doc;
  doc["command"] = "wald";
  doc["method"] = res.method;
  doc["n"] = series.n();
  doc["names"] = series.names();
  doc["statistic"] = res.statistic;
  doc["df"] = res.df;
  doc["pvalue"] = res.pvalue;
  doc["mu0"] = mu0_values;
  ordered_json mean_json = ordered_json::array();
  for (Eigen::Index i = 0; i < mean.size(); ++i) mean_json.push_back(mean(i));
  doc["sample_mean"] = std::move(mean_json);
  write_output(doc.dump(2) + "\n", opts.output);
  return 0;
}

struct SimulateOpts {
  int dgp = 1;
  std::size_t n = 100;
  std::size_t reps = 2000;
  std::uint64_t seed = 0;  // fixed default, never wall clock
  std::size_t burnin = 200;
  unsigned threads = 1;
  std::string output;
  std::string format = "csv";
};

int run_simulate(const SimulateOpts& opts,
                 const specbound::SearchConfig& search) {
  if (opts.dgp != 1 && opts.dgp != 2) {
    throw specbound::error("cli", "unknown process: --dgp takes 1 or 2");
  }
  specbound::McConfig cfg;
  cfg.reps = opts.reps;
  cfg.seed = opts.seed;
  cfg.n = opts.n;
  cfg.burnin = opts.burnin;
  cfg.threads = opts.threads;
  cfg.search = search;
  const specbound::McReport report = specbound::run_monte_carlo(
      opts.dgp == 1 ? specbound::DgpKind::Dgp1 : specbound::DgpKind::Dgp2,
      cfg);
  write_output(opts.format == "csv" ? report.to_csv() : report.to_json(),
               opts.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spectral density at the boundary frequencies 0 and pi: local "
      "quadratic and flat-top lag-window estimators, long-run covariance, "
      "and a Wald test of the mean"};
  app.require_subcommand(1);

  CommonOpts est_opts;
  std::string freq_text = "0";
  std::string psd_text = "clampzero";
  double est_eps = 0.01;
  double delta_override = 0.0;
  CLI::App* est = app.add_subcommand(
      "estimate", "estimate the spectral density matrix at a boundary");
  add_common(est, &est_opts, "json");
  est->add_option("--freq", freq_text,
                  "frequency: 0, pi, or interior radians (flattop only)");
  est->add_option("--psd", psd_text,
                  "positive-definiteness correction: clampzero or clampeps");
  est->add_option("--eps", est_eps, "eps for the clampeps floor eps/n");
  CLI::Option* delta_opt = est->add_option(
      "--delta", delta_override,
      "fixed bandwidth fraction, skipping data-based selection");

  CommonOpts lr_opts;
  double lr_eps = 0.01;
  bool lr_no_rescale = false;
  CLI::App* lr = app.add_subcommand(
      "longrun", "long-run covariance of the mean, 2*pi times f(0)");
  add_common(lr, &lr_opts, "json");
  lr->add_option("--eps", lr_eps, "eps for the invertibility floor eps/n");
  lr->add_flag("--no-rescale", lr_no_rescale,
               "estimate on the original component scales");

  CommonOpts wald_opts;
  std::vector<double> mu0_values;
  double wald_eps = 0.01;
  bool wald_no_rescale = false;
  CLI::App* wald = app.add_subcommand(
      "wald", "Wald test of the mean vector against --mu0");
  add_common(wald, &wald_opts, "json");
  wald->add_option("--mu0", mu0_values,
                   "hypothesized mean, comma separated")
      ->required()
      ->delimiter(',');
  wald->add_option("--eps", wald_eps, "eps for the invertibility floor eps/n");
  wald->add_flag("--no-rescale", wald_no_rescale,
                 "estimate on the original component scales");

  SimulateOpts sim_opts;
  specbound::SearchConfig sim_search;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte Carlo comparison of both estimators on a test "
                  "process");
  sim->add_option("--dgp", sim_opts.dgp, "test process: 1 or 2");
  sim->add_option("-n,--n", sim_opts.n, "series length per replication");
  sim->add_option("--reps", sim_opts.reps, "number of replications");
  sim->add_option("--seed", sim_opts.seed, "base seed (default 0)");
  sim->add_option("--burnin", sim_opts.burnin, "warm-up steps discarded");
  sim->add_option("--threads", sim_opts.threads, "worker threads");
  sim->add_option("-o,--output", sim_opts.output,
                  "output file (stdout when omitted)");
  sim->add_option("--format", sim_opts.format, "output format: csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  sim->add_option("--delta-min", sim_search.delta_min,
                  "lower end of the bandwidth fraction search");
  sim->add_option("--delta-max", sim_search.delta_max,
                  "upper end of the bandwidth fraction search");
  sim->add_option("--grid-points", sim_search.grid_points,
                  "coarse grid size for the search");
  sim->add_option("--tol", sim_search.tol, "refinement tolerance");
  sim->add_flag("--grid-only", sim_search.grid_only,
                "skip refinement, scan a dense grid");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) {
      return run_estimate(est_opts, freq_text, psd_text, est_eps,
                          delta_opt->count() > 0
                              ? std::optional<double>(delta_override)
                              : std::nullopt);
    }
    if (lr->parsed()) {
      return run_longrun(lr_opts, lr_eps, lr_no_rescale);
    }
    if (wald->parsed()) {
      return run_wald(wald_opts, mu0_values, wald_eps, wald_no_rescale);
    }
    if (sim->parsed()) {
      return run_simulate(sim_opts, sim_search);
    }
  } catch (const specbound::error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "[cli] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
