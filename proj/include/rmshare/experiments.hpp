// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmshare/baselines.hpp"
#include "rmshare/config.hpp"
#include "rmshare/optimizer.hpp"
#include "rmshare/radiomap.hpp"

namespace rmshare {

enum class EstimatorKind { Truth, Grid, CurveFit };

EstimatorKind parse_estimator(std::string_view name);
const char* to_string(EstimatorKind kind);

enum class Scheme { Proposed, Algorithm2Equal, Algorithm2Priority, UnilateralC, UnilateralR };

Scheme parse_scheme(std::string_view name);
const char* to_string(Scheme scheme);
std::vector<Scheme> all_schemes();

enum class ExperimentKind { ConvergenceHistogram, RreqSweep, BudgetSweep, BeamwidthSweep, MismatchSweep, MapAccuracy };

ExperimentKind parse_experiment(std::string_view name);
const char* to_string(ExperimentKind kind);

/// Path-loss estimators for one propagation field. The map estimators are trained once on a
/// dataset sampled from the field (or loaded from the configured CSV).
class EstimatorSet {
public:
  explicit EstimatorSet(const ScenarioConfig& config);

  const PathlossEstimator& get(EstimatorKind kind) const;
  const CsiDataset& dataset() const { return dataset_; }
  const GroundTruthEstimator& truth() const { return truth_; }
  const GridMapEstimator& grid() const { return *grid_; }
  const CurveFitEstimator& curve_fit() const { return *curve_; }

private:
  GroundTruthEstimator truth_;
  CsiDataset dataset_;
  std::unique_ptr<GridMapEstimator> grid_;
  std::unique_ptr<CurveFitEstimator> curve_;
};

SharingInstance make_instance(const ScenarioConfig& config, const Topology& topo, const PathlossEstimator& estimator,
                              const AntennaPattern& antenna);
inline SharingInstance make_instance(const ScenarioConfig& config, const PathlossEstimator& estimator) {
  return make_instance(config, config.topology, estimator, config.antenna);
}

/// One scheme run: allocation computed on `planning` CSI, scored on `truth` CSI.
struct SchemeOutcome {
  std::string status = "ok"; // ok | infeasible | not_converged | error
  std::string message;
  PowerAllocation alloc;
  double gamma = 0.0;       // min radar SINR on the scoring CSI (linear)
  double min_sinr_db = 0.0;
  double pd = 0.0;          // detection probability of the weakest radar
  double rate_ap = 0.0;
  double rate_mc = 0.0;
  int iters = 0;
  SolveReport report;       // filled for the iterative-allocator schemes
};

SchemeOutcome run_scheme(Scheme scheme, const SharingInstance& planning, const SharingInstance& truth,
                         const RunConfig& run, std::uint64_t mc_seed);

struct ResultRow {
  double sweep_value = 0.0;
  std::string scheme;
  std::string estimator;
  SchemeOutcome outcome;
  std::uint64_t seed = 0;
};

inline constexpr const char* kResultsHeader =
    "sweep_value,scheme,estimator,gamma,min_sinr_db,pd,rate_ap,rate_mc,status,iters,seed";

std::string format_row(const ResultRow& row);

/// Runs `count` independent jobs on at most `workers` threads; outputs are stored by index, so the
/// result order never depends on completion order. The first exception (by index) is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

struct ExperimentOutput {
  std::filesystem::path results;            // main CSV
  std::vector<std::filesystem::path> extra; // companion files
  std::size_t rows = 0;
};

/// Executes one sweep and writes `<out_dir>/<kind>.csv` (plus companions). Deterministic per seed.
ExperimentOutput run_experiment(const ScenarioConfig& config, ExperimentKind kind, const std::filesystem::path& out_dir);

/// Pivots a results file into `x,series,y` rows. Kind is read from the leading `# kind=` line
/// (or recognised from the mismatch table header). Throws InvalidArgument on an unknown kind.
void emit_plotdata(const std::filesystem::path& results, const std::filesystem::path& out);

/// Solves the configured scenario with the iterative allocator and writes `solution.csv` and `trace.csv`.
struct SolveOutput {
  SchemeOutcome outcome;
  std::filesystem::path solution;
  std::filesystem::path trace;
};
SolveOutput solve_scenario(const ScenarioConfig& config, EstimatorKind estimator, const std::filesystem::path& out_dir);

/// Invariant checks on the configured scenario; one callback per check.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<CheckResult> validate_scenario(const ScenarioConfig& config,
                                           const std::function<void(const CheckResult&)>& on_result = {});

} // namespace rmshare
