// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library only through the C interface.
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmshare/rmshare.h"

namespace {

struct ScenarioDeleter {
  void operator()(rms_scenario* s) const { rms_scenario_free(s); }
};
struct SolutionDeleter {
  void operator()(rms_solution* s) const { rms_solution_free(s); }
};
using ScenarioPtr = std::unique_ptr<rms_scenario, ScenarioDeleter>;
using SolutionPtr = std::unique_ptr<rms_solution, SolutionDeleter>;

int report(rms_status status) {
  if (status == RMS_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", rms_status_name(status), rms_last_error());
  return static_cast<int>(status);
}

ScenarioPtr load(const std::string& path, std::optional<std::uint64_t> seed, int& rc) {
  rms_scenario* raw = nullptr;
  rc = report(rms_scenario_load(path.c_str(), &raw));
  ScenarioPtr s(raw);
  if (rc == 0 && seed) rc = report(rms_scenario_set_seed(s.get(), *seed));
  return s;
}

void print_check(const char* name, int pass, const char* detail, void*) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radio-map-assisted power sharing between base stations and radars"};
  app.set_version_flag("--version", std::string(rms_version()));
  app.require_subcommand(1);

  std::string config, estimator, out_dir = ".", kind, results, output, tx_id;
  std::optional<std::uint64_t> seed;

  auto* solve = app.add_subcommand("solve", "Run the joint power allocation on one scenario");
  solve->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  solve->add_option("--estimator", estimator, "CSI source")->check(CLI::IsMember({"truth", "grid", "curvefit"}));
  solve->add_option("--seed", seed, "Override the run seed");
  solve->add_option("--out", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep and write its results CSV");
  sweep->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--experiment", kind, "Experiment kind")
      ->required()
      ->check(CLI::IsMember({"convergence_histogram", "rreq_sweep", "budget_sweep", "beamwidth_sweep",
                             "mismatch_sweep", "map_accuracy"}));
  sweep->add_option("--seed", seed, "Override the run seed");
  sweep->add_option("--out", out_dir, "Output directory");

  auto* validate = app.add_subcommand("validate", "Check solver invariants on a scenario");
  validate->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* plot = app.add_subcommand("emit-plotdata", "Pivot a results CSV into x,series,y rows");
  plot->add_option("--results", results, "Results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", output, "Output CSV")->required();

  auto* map = app.add_subcommand("map-export", "Write one transmitter's path-loss grid as row,col,pathloss_db");
  map->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  map->add_option("--tx", tx_id, "Transmitter id, e.g. bs0 or radar1")->required();
  map->add_option("--out", output, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  int rc = 0;
  if (*solve) {
    ScenarioPtr s = load(config, seed, rc);
    if (rc) return rc;
    rms_solution* raw = nullptr;
    rc = report(rms_solve(s.get(), estimator.empty() ? nullptr : estimator.c_str(), out_dir.c_str(), &raw));
    if (rc) return rc;
    SolutionPtr sol(raw);
    size_t mc = 0, mr = 0;
    rms_scenario_counts(s.get(), &mc, &mr);
    std::vector<double> pc(mc), pr(mr);
    rms_solution_powers(sol.get(), pc.data(), mc, pr.data(), mr);
    rms_summary sum{};
    rms_solution_summary(sol.get(), &sum);
    for (size_t j = 0; j < mc; ++j) std::printf("bs%zu    %12.6g W\n", j, pc[j]);
    for (size_t i = 0; i < mr; ++i) std::printf("radar%zu %12.6g W\n", i, pr[i]);
    std::printf("min SINR %.4f dB, P_D %.6f, R_ap %.6f, R_mc %.6f bits/s/Hz, %d iterations%s\n", sum.min_sinr_db, sum.pd,
                sum.rate_ap, sum.rate_mc, sum.iterations, sum.converged ? "" : " (not converged)");
    return 0;
  }
  if (*sweep) {
    ScenarioPtr s = load(config, seed, rc);
    if (rc) return rc;
    char path[4096];
    rc = report(rms_run_experiment(s.get(), kind.c_str(), out_dir.c_str(), path, sizeof path));
    if (rc == 0) std::printf("%s\n", path);
    return rc;
  }
  if (*validate) {
    ScenarioPtr s = load(config, std::nullopt, rc);
    if (rc) return rc;
    int all = 0;
    rc = report(rms_validate(s.get(), print_check, nullptr, &all));
    if (rc) return rc;
    return all ? 0 : 1;
  }
  if (*plot) return report(rms_emit_plotdata(results.c_str(), output.c_str()));
  if (*map) {
    ScenarioPtr s = load(config, std::nullopt, rc);
    if (rc) return rc;
    return report(rms_export_map(s.get(), tx_id.c_str(), output.c_str()));
  }
  return 0;
}
