#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mopal/mopal.h"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitSolved = 0;
constexpr int kExitNotSolved = 1;
constexpr int kExitUsage = 2;

struct ProblemDeleter {
  void operator()(mopal_problem* p) const { mopal_problem_destroy(p); }
};
struct ResultDeleter {
  void operator()(mopal_result* r) const { mopal_result_destroy(r); }
};
using ProblemPtr = std::unique_ptr<mopal_problem, ProblemDeleter>;
using ResultPtr = std::unique_ptr<mopal_result, ResultDeleter>;

ProblemPtr openProblem(const std::string& name, int& exit_code) {
  mopal_problem* raw = nullptr;
  const int rc = mopal_problem_create(name.c_str(), &raw);
  if (rc != MOPAL_OK) {
    std::cerr << mopal_last_error() << "\n";
    exit_code = kExitUsage;
    return nullptr;
  }
  exit_code = kExitSolved;
  return ProblemPtr(raw);
}

int cmdList() {
  for (int i = 0; i < mopal_catalog_size(); ++i) std::cout << mopal_catalog_name(i) << "\n";
  return kExitSolved;
}

int cmdCheck(const std::string& name) {
  int exit_code = 0;
  const ProblemPtr problem = openProblem(name, exit_code);
  if (!problem) return exit_code;

  int pass = 0;
  double max_error = 0.0;
  const int rc =
      mopal_problem_check_derivatives(problem.get(), nullptr, 0, 1e-5, &pass, &max_error);
  if (rc != MOPAL_OK) {
    std::cerr << mopal_last_error() << "\n";
    return kExitUsage;
  }
  std::cout << name << ": derivative check " << (pass ? "passed" : "FAILED")
            << " (max error " << max_error << ")\n";
  return pass ? kExitSolved : kExitNotSolved;
}

struct RunConfig {
  std::string problem;
  double tol = 0.0;
  double mu0 = 0.0;
  double mu_factor = 0.0;
  int max_outer = 0;
  std::string hessian = "exact";
  std::string out_path = "-";
  std::string format = "json";
  int seed = 0;
};

std::string formatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> fetch(const mopal_result* r, int (*size_fn)(const mopal_result*),
                          int (*get_fn)(const mopal_result*, double*, int)) {
  std::vector<double> v(static_cast<std::size_t>(size_fn(r)));
  if (!v.empty()) get_fn(r, v.data(), static_cast<int>(v.size()));
  return v;
}

std::string renderJson(const RunConfig& cfg, const mopal_result* r) {
  ordered_json doc;
  doc["problem"] = cfg.problem;
  doc["status"] = mopal_result_status_string(r);
  doc["settings"] = {{"tol", cfg.tol},       {"mu0", cfg.mu0},
                     {"mu_factor", cfg.mu_factor}, {"max_outer", cfg.max_outer},
                     {"hessian", cfg.hessian},     {"seed", cfg.seed}};
  doc["solution"] = {{"x", fetch(r, mopal_result_x_size, mopal_result_x)},
                     {"y", fetch(r, mopal_result_y_size, mopal_result_y)},
                     {"z", fetch(r, mopal_result_z_size, mopal_result_z)}};
  double prim = 0.0, dual = 0.0, comp = 0.0;
  mopal_result_residuals(r, &prim, &dual, &comp);
  doc["residuals"] = {{"prim", prim}, {"dual", dual}, {"comp", comp}};
  doc["iters"] = {{"outer", mopal_result_outer_iters(r)},
                  {"inner", mopal_result_inner_iters(r)}};
  doc["trace"] = ordered_json::array();
  for (int i = 0; i < mopal_result_trace_size(r); ++i) {
    mopal_trace_row row;
    mopal_result_trace_row(r, i, &row);
    doc["trace"].push_back({{"k", row.k},
                            {"mu", row.mu},
                            {"prim", row.prim},
                            {"dual", row.dual},
                            {"comp", row.comp},
                            {"merit", row.merit},
                            {"alpha", row.alpha},
                            {"inner_iters", row.inner_iters}});
  }
  doc["time_ms"] = mopal_result_time_ms(r);
  return doc.dump(2) + "\n";
}

std::string renderCsv(const mopal_result* r) {
  std::string out = "k,mu,prim,dual,comp,merit,alpha,inner_iters\n";
  for (int i = 0; i < mopal_result_trace_size(r); ++i) {
    mopal_trace_row row;
    mopal_result_trace_row(r, i, &row);
    out += std::to_string(row.k) + ',' + formatDouble(row.mu) + ',' + formatDouble(row.prim) +
           ',' + formatDouble(row.dual) + ',' + formatDouble(row.comp) + ',' +
           formatDouble(row.merit) + ',' + formatDouble(row.alpha) + ',' +
           std::to_string(row.inner_iters) + '\n';
  }
  return out;
}

int cmdRun(const RunConfig& cfg) {
  int exit_code = 0;
  const ProblemPtr problem = openProblem(cfg.problem, exit_code);
  if (!problem) return exit_code;

  mopal_settings settings;
  mopal_settings_default(&settings);
  settings.tol_abs = cfg.tol;
  settings.mu_init = cfg.mu0;
  settings.mu_factor = cfg.mu_factor;
  settings.max_outer = cfg.max_outer;
  if (cfg.hessian == "exact")
    settings.hessian_mode = MOPAL_HESSIAN_EXACT;
  else if (cfg.hessian == "gn")
    settings.hessian_mode = MOPAL_HESSIAN_GAUSS_NEWTON;
  else
    settings.hessian_mode = MOPAL_HESSIAN_IDENTITY;

  mopal_result* raw = nullptr;
  const int rc =
      mopal_solve(problem.get(), nullptr, 0, nullptr, 0, nullptr, 0, &settings, &raw);
  if (rc != MOPAL_OK) {
    std::cerr << mopal_last_error() << "\n";
    return kExitUsage;
  }
  const ResultPtr result(raw);

  const std::string doc =
      cfg.format == "json" ? renderJson(cfg, result.get()) : renderCsv(result.get());
  if (cfg.out_path == "-") {
    std::cout << doc;
  } else {
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot open output file: " << cfg.out_path << "\n";
      return kExitUsage;
    }
    file << doc;
  }
  return mopal_result_status(result.get()) == MOPAL_STATUS_CONVERGED ? kExitSolved
                                                                     : kExitNotSolved;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented-Lagrangian solver for the built-in problem suite"};
  app.require_subcommand(1);

  app.add_subcommand("list", "Print the catalog names, one per line");

  std::string check_name;
  CLI::App* check = app.add_subcommand("check", "Finite-difference derivative check");
  check->add_option("problem", check_name, "Catalog problem name")->required();

  RunConfig cfg;
  mopal_settings defaults;
  mopal_settings_default(&defaults);
  cfg.tol = defaults.tol_abs;
  cfg.mu0 = defaults.mu_init;
  cfg.mu_factor = defaults.mu_factor;
  cfg.max_outer = defaults.max_outer;

  CLI::App* run = app.add_subcommand("run", "Solve a catalog problem and emit the trace");
  run->add_option("problem", cfg.problem, "Catalog problem name")->required();
  run->add_option("--tol", cfg.tol, "Convergence tolerance on all KKT residuals");
  run->add_option("--mu0", cfg.mu0, "Initial penalty parameter");
  run->add_option("--mu-factor", cfg.mu_factor, "Penalty shrink factor per rejection");
  run->add_option("--max-outer", cfg.max_outer, "Outer iteration limit");
  run->add_option("--hessian", cfg.hessian, "Hessian model")
      ->check(CLI::IsMember({"exact", "gn", "id"}));
  run->add_option("--out", cfg.out_path, "Output path ('-' for stdout)");
  run->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--seed", cfg.seed, "Seed recorded in the output document");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) return cmdList();
  if (app.got_subcommand("check")) return cmdCheck(check_name);
  return cmdRun(cfg);
}
