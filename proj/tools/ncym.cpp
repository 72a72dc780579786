// Command-line front end over the C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ncym/ncym.h"

namespace {

int status_exit(ncym_status s) {
  std::cerr << "ncym: " << ncym_status_name(s) << ": " << ncym_last_error() << "\n";
  return s == NCYM_ERR_PARSE || s == NCYM_ERR_IO || s == NCYM_ERR_VALIDATION ? NCYM_EXIT_VALIDATION : NCYM_EXIT_ERROR;
}

// Writes artifacts, prints the summary and returns the run's exit code.
int finish(ncym_run* run, const std::string& out_dir) {
  const int code = ncym_run_exit_code(run);
  std::cout << ncym_run_summary(run);
  const ncym_status w = ncym_run_write(run, out_dir.c_str());
  if (w != NCYM_OK) {
    ncym_run_free(run);
    return status_exit(w);
  }
  if (code == NCYM_EXIT_VALIDATION || code == NCYM_EXIT_ERROR) {
    const auto report = nlohmann::json::parse(ncym_run_report(run));
    if (report.contains("error")) std::cerr << "ncym: " << report.at("error").get<std::string>() << "\n";
  }
  if (code == NCYM_EXIT_NONCONVERGENCE) std::cerr << "ncym: solver did not converge; partial artifacts written\n";
  std::cerr << "artifacts in " << out_dir << "\n";
  ncym_run_free(run);
  return code;
}

int run_config(const nlohmann::json& cfg, long long seed, const std::string& out_dir) {
  ncym_run* run = nullptr;
  const ncym_status s = ncym_run_json(cfg.dump().c_str(), seed, &run);
  if (s != NCYM_OK) return status_exit(s);
  return finish(run, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noncommutative Yang-Mills workbench"};
  app.require_subcommand(1);
  std::string out_dir = "ncym_out";
  int threads = 0;
  long long seed = -1;
  app.add_option("--output-dir", out_dir, "Directory for reports and artifacts");
  app.add_option("--threads", threads, "Worker count hint (default: NCYM_THREADS or 1)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Override the configuration seed")->check(CLI::NonNegativeNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  run->add_option("config", config_path, "JSON configuration file")->required();

  std::string filter;
  auto* self = app.add_subcommand("selfcheck", "Run the invariant suite");
  self->add_option("--filter", filter, "Restrict to one module");

  int chern_N = 16, chern_fd = 4, chern_q = 2;
  double rho = 1.0;
  bool refine = false;
  auto* chern = app.add_subcommand("chern", "Chern number of the BPST instanton on the 4-sphere");
  chern->add_option("--N", chern_N, "Grid points per axis")->check(CLI::Range(4, 512));
  chern->add_option("--rho", rho, "Instanton scale")->check(CLI::PositiveNumber);
  chern->add_option("--fd-order", chern_fd, "Stencil order (2 or 4)")->check(CLI::IsMember({2, 4}));
  chern->add_option("--q", chern_q, "Chern-Weil degree")->check(CLI::Range(1, 2));
  chern->add_flag("--refine", refine, "Also compute at about 3N/4 and report an error estimate");

  auto* lc = app.add_subcommand("lc", "Levi-Civita connection diagnostics");
  lc->require_subcommand(1);
  std::string lc_config;
  int lc_N = 32;
  double lc_amp = 0.15;
  auto* lc_check = lc->add_subcommand("check", "Torsion, metricity and Koszul residuals");
  lc_check->add_option("config", lc_config, "Optional configuration file (task is forced to lc-check)");
  lc_check->add_option("--N", lc_N, "Grid points per axis for the built-in smooth torus case")->check(CLI::Range(4, 512));
  lc_check->add_option("--amplitude", lc_amp, "Metric perturbation amplitude")->check(CLI::NonNegativeNumber);

  std::string report_path, kind = "trace", csv_out;
  auto* plot = app.add_subcommand("plot", "Columnar CSV from a report");
  plot->add_option("report", report_path, "Report JSON written by run")->required();
  plot->add_option("--kind", kind, "trace | slice | profile")->check(CLI::IsMember({"trace", "slice", "profile"}));
  plot->add_option("--out", csv_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : NCYM_EXIT_VALIDATION;
  }

  if (threads <= 0)
    if (const char* env = std::getenv("NCYM_THREADS")) threads = std::atoi(env);
  ncym_set_threads(threads > 0 ? threads : 1);

  if (*run) {
    ncym_run* r = nullptr;
    const ncym_status s = ncym_run_file(config_path.c_str(), seed, &r);
    if (s != NCYM_OK) return status_exit(s);
    return finish(r, out_dir);
  }

  if (*self) {
    ncym_run* r = nullptr;
    const ncym_status s = ncym_selfcheck(filter.c_str(), &r);
    if (s != NCYM_OK) return status_exit(s);
    return finish(r, out_dir);
  }

  if (*chern) {
    nlohmann::json cfg = {{"task", "chern"},
                          {"manifold", {{"kind", "sphere"}, {"dim", 4}, {"N", chern_N}, {"bundle", "instanton"}, {"fd_order", chern_fd}}},
                          {"connection", {{"kind", "bpst"}, {"rho", rho}}},
                          {"chern", {{"q", chern_q}, {"refine", refine}}}};
    return run_config(cfg, seed, out_dir);
  }

  if (*lc_check) {
    nlohmann::json cfg;
    if (!lc_config.empty()) {
      std::ifstream in(lc_config);
      if (!in) {
        std::cerr << "ncym: cannot read '" << lc_config << "'\n";
        return NCYM_EXIT_VALIDATION;
      }
      try {
        cfg = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "ncym: " << lc_config << ": " << e.what() << "\n";
        return NCYM_EXIT_VALIDATION;
      }
      if (cfg.is_object()) cfg["task"] = "lc-check";
    } else {
      cfg = {{"task", "lc-check"},
             {"manifold", {{"kind", "torus"}, {"dim", 2}, {"N", lc_N}}},
             {"base_metric", {{"kind", "smooth"}, {"amplitude", lc_amp}}},
             {"algebra", {{"n", 2}, {"internal_metric", {{"kind", "smooth"}, {"amplitude", lc_amp}}}}},
             {"connection", {{"kind", "random"}, {"amplitude", 0.4}}}};
    }
    return run_config(cfg, seed, out_dir);
  }

  // plot
  std::ifstream in(report_path);
  if (!in) {
    std::cerr << "ncym: missing artifact '" << report_path << "'\n";
    return NCYM_EXIT_ERROR;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  char* csv = nullptr;
  const ncym_status s = ncym_plot_csv(ss.str().c_str(), kind.c_str(), &csv);
  if (s != NCYM_OK) return status_exit(s);
  if (csv_out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(csv_out);
    f << csv;
    if (!f) {
      ncym_string_free(csv);
      std::cerr << "ncym: cannot write '" << csv_out << "'\n";
      return NCYM_EXIT_ERROR;
    }
  }
  ncym_string_free(csv);
  return NCYM_EXIT_OK;
}
