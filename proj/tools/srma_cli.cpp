#include "srma/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kUsageError = 2;
constexpr int kRunFailure = 1;

bool require_file(const std::string& path) {
  if (std::filesystem::is_regular_file(path)) return true;
  std::cerr << "error: config file not found: " << path << '\n';
  return false;
}

int cmd_run(const std::string& path) {
  if (!require_file(path)) return kUsageError;
  const srma::ExperimentConfig cfg = srma::load_experiment(path);
  const srma::ExperimentResult result = srma::run_experiment(cfg);
  int diverged = 0;
  for (const auto& run : result.runs) diverged += run.result.diverged ? 1 : 0;
  std::cout << "wrote " << (cfg.output_dir / "raw.csv").string() << ", aggregate.csv, summary.csv ("
            << result.runs.size() << " runs, " << diverged << " diverged)\n";
  return 0;
}

int cmd_constants(const std::string& d, const std::string& sigma, const std::string& ur,
                  const std::string& gamma, const std::string& cw) {
  using srma::format_double;
  using srma::parse_double;
  const srma::SmoothnessConstants k =
      srma::smoothness_constants(parse_double(d, "--D"), parse_double(sigma, "--sigma"),
                                 parse_double(ur, "--UR"), parse_double(gamma, "--gamma"),
                                 parse_double(cw, "--Cw"));
  std::cout << "B=" << format_double(k.B) << '\n'
            << "L_pi=" << format_double(k.L_pi) << '\n'
            << "L=" << format_double(k.L) << '\n'
            << "m0=" << format_double(k.m0) << '\n'
            << "m1=" << format_double(k.m1) << '\n'
            << "m2=" << format_double(k.m2) << '\n'
            << "m3=" << format_double(k.m3) << '\n'
            << "m3_tilde=" << format_double(k.m3_tilde) << '\n'
            << "E_T=" << format_double(k.E_T) << '\n'
            << "E_T2=" << format_double(k.E_T2) << '\n'
            << "L1=" << format_double(k.L1) << '\n'
            << "C_w=" << format_double(k.C_w) << '\n';
  return 0;
}

int cmd_lambda(const std::string& family, const std::string& sigma, const std::string& grid,
               const std::string& d) {
  srma::PolicyFamily fam;
  if (family == "gaussian") {
    fam = srma::PolicyFamily::kGaussian;
  } else if (family == "cauchy") {
    fam = srma::PolicyFamily::kCauchy;
  } else {
    std::cerr << "error: --family must be gaussian or cauchy\n";
    return kUsageError;
  }
  const double D = srma::parse_double(d, "--D");
  if (!(D > 0.0)) throw std::invalid_argument("--D must be positive");
  // phi(s) = [s] at s = D gives a feature of norm exactly D.
  const srma::PolicyModel<double> p(fam, srma::Vec::Zero(1), srma::parse_double(sigma, "--sigma"),
                                    srma::FeatureMap<double>::linear());
  std::cout << "c,lambda,cap\n";
  for (double c : srma::parse_double_list(grid, "--c-grid")) {
    const auto cap = srma::exploration_tolerance_cap(p, D, c);
    std::cout << srma::format_double(c) << ',' << srma::format_double(srma::exploration_tolerance(p, D, c))
              << ',' << (cap ? srma::format_double(*cap) : "") << '\n';
  }
  return 0;
}

int cmd_probe(const std::string& path) {
  if (!require_file(path)) return kUsageError;
  const srma::ProbeConfig cfg = srma::load_probe_config(path);
  if (cfg.output) {
    std::ofstream out(*cfg.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + cfg.output->string() + "'");
    srma::write_probe_csv(out, cfg);
  } else {
    srma::write_probe_csv(std::cout, cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic recursive mirror ascent for policy search"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV files");
  run->add_option("config", run_path, "experiment config file")->required();

  std::string d = "1", sigma, ur, gamma, cw = "1";
  auto* constants = app.add_subcommand("constants", "Print the smoothness and variance constants");
  constants->add_option("--D", d, "feature norm bound")->required();
  constants->add_option("--sigma", sigma, "policy scale")->required();
  constants->add_option("--UR", ur, "reward bound")->required();
  constants->add_option("--gamma", gamma, "discount factor")->required();
  constants->add_option("--Cw", cw, "importance-weight constant (default 1)");

  std::string family, lambda_sigma, grid, lambda_d = "1";
  auto* lambda = app.add_subcommand("lambda", "Print the exploration-tolerance curve as CSV");
  lambda->add_option("--family", family, "gaussian or cauchy")->required();
  lambda->add_option("--sigma", lambda_sigma, "policy scale")->required();
  lambda->add_option("--c-grid", grid, "comma-separated half widths")->required();
  lambda->add_option("--D", lambda_d, "feature norm (default 1)");

  std::string probe_path;
  auto* probe = app.add_subcommand("probe-tracking", "Estimate the tracking error on a synthetic objective");
  probe->add_option("config", probe_path, "probe config file")->required();

  app.add_subcommand("selftest", "Run the fast invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*run) return cmd_run(run_path);
    if (*constants) return cmd_constants(d, sigma, ur, gamma, cw);
    if (*lambda) return cmd_lambda(family, lambda_sigma, grid, lambda_d);
    if (*probe) return cmd_probe(probe_path);
    return srma::run_selftest(std::cout) == 0 ? 0 : kRunFailure;
  } catch (const srma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kRunFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  }
}
