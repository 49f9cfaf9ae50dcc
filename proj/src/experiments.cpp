// SPDX-License-Identifier: Apache-2.0
#include "rmshare/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "rmshare/errors.hpp"
#include "rmshare/metrics.hpp"
#include "rmshare/waveform.hpp"

namespace rmshare {

namespace {

constexpr double kPlacementExclusionM = 50.0;
constexpr int kMapProbes = 2000;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void require_sorted(const std::vector<double>& v, const char* key) {
  if (v.empty()) throw InvalidArgument(std::string("sweep.") + key + ": no sweep values");
  if (!std::is_sorted(v.begin(), v.end())) throw InvalidArgument(std::string("sweep.") + key + ": values must be sorted");
}

std::vector<double> or_default(std::vector<double> v, double fallback) {
  if (v.empty()) v.push_back(fallback);
  return v;
}

std::vector<Scheme> schemes_of(const ScenarioConfig& c, std::vector<Scheme> fallback) {
  if (c.sweep.schemes.empty()) return fallback;
  std::vector<Scheme> out;
  for (const auto& s : c.sweep.schemes) out.push_back(parse_scheme(s));
  return out;
}

int worker_count(const RunConfig& run) {
  if (run.workers > 0) return run.workers;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

Position uniform_in(std::mt19937_64& rng, const BoundingBox& b) {
  std::uniform_real_distribution<double> ux(b.x_min, b.x_max), uy(b.y_min, b.y_max);
  const double x = ux(rng);
  return {x, uy(rng)};
}

bool near_transmitter(const Topology& t, Position p, double radius) {
  for (Position q : t.bs_positions) {
    if (distance(p, q) < radius) return true;
  }
  for (Position q : t.radar_positions) {
    if (distance(p, q) < radius) return true;
  }
  return false;
}

struct Job {
  double sweep_value = 0.0;
  std::string label; // scheme column
  Scheme scheme = Scheme::Proposed;
  EstimatorKind estimator = EstimatorKind::Truth;
  Topology topology;
  Limits limits;
  AntennaPattern antenna;
};

std::vector<ResultRow> run_jobs(const ScenarioConfig& c, const EstimatorSet& est, const std::vector<Job>& jobs) {
  std::vector<ResultRow> rows(jobs.size());
  parallel_for(jobs.size(), worker_count(c.run), [&](std::size_t k) {
    const Job& job = jobs[k];
    ScenarioConfig local = c;
    local.limits = job.limits;
    ResultRow& row = rows[k];
    row.sweep_value = job.sweep_value;
    row.scheme = job.label;
    row.estimator = to_string(job.estimator);
    row.seed = c.run.seed;
    try {
      const SharingInstance truth = make_instance(local, job.topology, est.truth(), job.antenna);
      const SharingInstance planning = job.estimator == EstimatorKind::Truth
                                           ? truth
                                           : make_instance(local, job.topology, est.get(job.estimator), job.antenna);
      row.outcome = run_scheme(job.scheme, planning, truth, c.run, c.run.seed);
    } catch (const Error& e) {
      row.outcome.status = "error";
      row.outcome.message = e.what();
    }
  });
  return rows;
}

void write_results(const std::filesystem::path& path, ExperimentKind kind, std::uint64_t seed,
                   const std::vector<ResultRow>& rows) {
  auto os = open_out(path);
  os << "# kind=" << to_string(kind) << " seed=" << seed << '\n' << kResultsHeader << '\n';
  for (const auto& r : rows) os << format_row(r) << '\n';
}

std::string file_kind(std::istream& in, std::string& header) {
  std::string line, kind;
  while (std::getline(in, line)) {
    if (line.rfind("# kind=", 0) == 0) {
      kind = line.substr(7, line.find(' ', 7) - 7);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    header = line;
    break;
  }
  if (kind.empty() && header == "delta_tau_s,delta_fd_hz,radar_id,sinr,pd") kind = "mismatch_sweep";
  return kind;
}

} // namespace

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "truth" || name == "ground_truth") return EstimatorKind::Truth;
  if (name == "grid" || name == "grid_map") return EstimatorKind::Grid;
  if (name == "curvefit" || name == "curve_fit") return EstimatorKind::CurveFit;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "' (truth, grid, curvefit)");
}

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Truth: return "truth";
    case EstimatorKind::Grid: return "grid";
    case EstimatorKind::CurveFit: return "curvefit";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : all_schemes()) {
    if (name == to_string(s)) return s;
  }
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Algorithm2Equal: return "algorithm2_equal";
    case Scheme::Algorithm2Priority: return "algorithm2_priority";
    case Scheme::UnilateralC: return "unilateral_c";
    case Scheme::UnilateralR: return "unilateral_r";
  }
  return "?";
}

std::vector<Scheme> all_schemes() {
  return {Scheme::Proposed, Scheme::Algorithm2Equal, Scheme::Algorithm2Priority, Scheme::UnilateralC,
          Scheme::UnilateralR};
}

ExperimentKind parse_experiment(std::string_view name) {
  for (ExperimentKind k : {ExperimentKind::ConvergenceHistogram, ExperimentKind::RreqSweep, ExperimentKind::BudgetSweep,
                           ExperimentKind::BeamwidthSweep, ExperimentKind::MismatchSweep, ExperimentKind::MapAccuracy}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("unknown experiment kind '" + std::string(name) + "'");
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ConvergenceHistogram: return "convergence_histogram";
    case ExperimentKind::RreqSweep: return "rreq_sweep";
    case ExperimentKind::BudgetSweep: return "budget_sweep";
    case ExperimentKind::BeamwidthSweep: return "beamwidth_sweep";
    case ExperimentKind::MismatchSweep: return "mismatch_sweep";
    case ExperimentKind::MapAccuracy: return "map_accuracy";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Estimators and instances
// ---------------------------------------------------------------------------

EstimatorSet::EstimatorSet(const ScenarioConfig& c) : truth_(c.field) {
  const auto txs = transmitters(c.topology);
  if (c.map.dataset.empty()) {
    dataset_ = sample_field(c.field, txs, scenario_bounds(c.topology, c.map.margin_m), c.map.sample_spacing_m);
  } else {
    dataset_ = ingest_dataset(c.map.dataset);
  }
  std::map<std::string, Position> positions;
  for (const auto& t : txs) positions[t.id] = t.position;
  grid_ = std::make_unique<GridMapEstimator>(build_grid_map(dataset_, c.map.cell_m));
  curve_ = std::make_unique<CurveFitEstimator>(fit_curve_model(dataset_, positions, c.radio.carrier_ghz));
}

const PathlossEstimator& EstimatorSet::get(EstimatorKind kind) const {
  switch (kind) {
    case EstimatorKind::Truth: return truth_;
    case EstimatorKind::Grid: return *grid_;
    case EstimatorKind::CurveFit: return *curve_;
  }
  return truth_;
}

SharingInstance make_instance(const ScenarioConfig& config, const Topology& topo, const PathlossEstimator& estimator,
                              const AntennaPattern& antenna) {
  SharingInstance inst;
  inst.limits = config.limits;
  inst.user_antennas = topo.user_antennas;
  inst.csi = build_csi(estimator, topo, antenna, config.radio);
  return inst;
}

SchemeOutcome run_scheme(Scheme scheme, const SharingInstance& planning, const SharingInstance& truth,
                         const RunConfig& run, std::uint64_t mc_seed) {
  SchemeOutcome out;
  try {
    if (scheme == Scheme::Algorithm2Equal || scheme == Scheme::Algorithm2Priority) {
      BaselineOptions opt;
      opt.step_w = run.step_w;
      opt.rule = scheme == Scheme::Algorithm2Equal ? BackoffRule::EqualBackoff : BackoffRule::ChannelPriority;
      const BaselineResult r = algorithm2(planning, opt);
      out.alloc = r.alloc;
      out.iters = static_cast<int>(r.steps);
    } else {
      AllocateOptions opt;
      opt.epsilon = run.epsilon;
      opt.max_iter = run.max_iter;
      opt.coupling_uses_num_bs = run.coupling_uses_num_bs;
      opt.variant = scheme == Scheme::Proposed      ? Variant::Joint
                    : scheme == Scheme::UnilateralC ? Variant::CommOnly
                                                    : Variant::RadarOnly;
      AllocationResult r = allocate(planning, opt);
      out.alloc = r.alloc;
      out.iters = r.report.iterations;
      if (!r.report.converged) out.status = "not_converged";
      out.report = std::move(r.report);
    }
  } catch (const InfeasibleError& e) {
    out.status = "infeasible";
    out.message = e.what();
    return out;
  } catch (const NumericalError& e) {
    out.status = "error";
    out.message = e.what();
    return out;
  }
  const Limits& lim = truth.limits;
  out.gamma = min_radar_sinr(out.alloc, truth.csi, lim.noise_power);
  out.min_sinr_db = out.gamma > 0.0 ? linear_to_db(out.gamma) : -std::numeric_limits<double>::infinity();
  out.pd = detection_probability(out.gamma, detection_threshold(lim.false_alarm_prob, lim.pulses_per_cpi),
                                 lim.pulses_per_cpi);
  out.rate_ap = ergodic_rate_approx(out.alloc, truth.csi, truth.user_antennas, lim.noise_power);
  out.rate_mc = run.mc_samples > 0 ? ergodic_rate_mc(out.alloc, truth.csi, truth.user_antennas, lim.noise_power,
                                                     run.mc_samples, mc_seed, 1)
                                         .mean
                                   : 0.0;
  return out;
}

std::string format_row(const ResultRow& r) {
  const SchemeOutcome& o = r.outcome;
  const bool scored = o.status == "ok" || o.status == "not_converged";
  auto field = [&](double v) { return scored ? num(v) : std::string(); };
  std::ostringstream os;
  os << num(r.sweep_value) << ',' << r.scheme << ',' << r.estimator << ',' << field(o.gamma) << ','
     << field(o.min_sinr_db) << ',' << field(o.pd) << ',' << field(o.rate_ap) << ',' << field(o.rate_mc) << ','
     << o.status << ',' << o.iters << ',' << r.seed;
  return os.str();
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentOutput run_experiment(const ScenarioConfig& c, ExperimentKind kind, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExperimentOutput out;
  out.results = out_dir / (std::string(to_string(kind)) + ".csv");
  const EstimatorSet est(c);
  const EstimatorKind default_est = parse_estimator(c.run.estimator);

  auto base_job = [&](double x, Scheme s) {
    Job j;
    j.sweep_value = x;
    j.label = to_string(s);
    j.scheme = s;
    j.estimator = default_est;
    j.topology = c.topology;
    j.limits = c.limits;
    j.antenna = c.antenna;
    return j;
  };

  std::vector<Job> jobs;
  switch (kind) {
    case ExperimentKind::RreqSweep: {
      const auto rreq = or_default(c.sweep.rreq, c.limits.r_req);
      require_sorted(rreq, "rreq");
      for (double r : rreq) {
        for (Scheme s : schemes_of(c, all_schemes())) {
          Job j = base_job(r, s);
          j.limits.r_req = r;
          jobs.push_back(std::move(j));
        }
      }
      break;
    }
    case ExperimentKind::BudgetSweep: {
      const auto rreq = or_default(c.sweep.rreq, c.limits.r_req);
      const auto pcsum = or_default(c.sweep.pcsum_w, c.limits.p_csum);
      const auto prsum = or_default(c.sweep.prsum_w, c.limits.p_rsum);
      require_sorted(rreq, "rreq");
      require_sorted(pcsum, "pcsum_w");
      require_sorted(prsum, "prsum_w");
      for (double pc : pcsum) {
        for (double pr : prsum) {
          for (double r : rreq) {
            for (Scheme s : schemes_of(c, {Scheme::Proposed})) {
              Job j = base_job(r, s);
              j.limits.r_req = r;
              j.limits.p_csum = pc;
              j.limits.p_rsum = pr;
              j.label = std::string(to_string(s)) + "@pcsum=" + num(pc) + "@prsum=" + num(pr);
              jobs.push_back(std::move(j));
            }
          }
        }
      }
      break;
    }
    case ExperimentKind::BeamwidthSweep: {
      const auto widths = or_default(c.sweep.beamwidths_deg, c.antenna.theta_3db_deg);
      require_sorted(widths, "beamwidths_deg");
      for (double w : widths) {
        for (Scheme s : schemes_of(c, {Scheme::Proposed})) {
          Job j = base_job(w, s);
          j.antenna.theta_3db_deg = w;
          jobs.push_back(std::move(j));
        }
      }
      break;
    }
    case ExperimentKind::ConvergenceHistogram: {
      std::mt19937_64 rng(c.run.seed);
      const BoundingBox box = scenario_bounds(c.topology, 0.0);
      for (int k = 0; k < c.sweep.placements; ++k) {
        Job j = base_job(k, Scheme::Proposed);
        do {
          j.topology.user_position = uniform_in(rng, box);
        } while (near_transmitter(c.topology, j.topology.user_position, kPlacementExclusionM));
        do {
          j.topology.target_position = uniform_in(rng, box);
        } while (near_transmitter(c.topology, j.topology.target_position, kPlacementExclusionM));
        jobs.push_back(std::move(j));
      }
      break;
    }
    case ExperimentKind::MapAccuracy: {
      const auto rreq = or_default(c.sweep.rreq, c.limits.r_req);
      require_sorted(rreq, "rreq");
      for (EstimatorKind e : {EstimatorKind::Truth, EstimatorKind::Grid, EstimatorKind::CurveFit}) {
        for (double r : rreq) {
          for (Scheme s : schemes_of(c, {Scheme::Proposed})) {
            Job j = base_job(r, s);
            j.limits.r_req = r;
            j.estimator = e;
            jobs.push_back(std::move(j));
          }
        }
      }
      // Map accuracy on random probes (seeded), away from the transmitters.
      std::mt19937_64 rng(c.run.seed);
      const BoundingBox box = scenario_bounds(c.topology, 0.0);
      std::vector<Position> probes;
      while (probes.size() < static_cast<std::size_t>(kMapProbes)) {
        const Position p = uniform_in(rng, box);
        if (!near_transmitter(c.topology, p, 1.0)) probes.push_back(p);
      }
      const auto txs = transmitters(c.topology);
      const auto path = out_dir / "map_error.csv";
      auto os = open_out(path);
      os << "estimator,map_error_db\n";
      os << "grid," << num(map_error(est.grid(), c.field, txs, probes)) << '\n';
      os << "curvefit," << num(map_error(est.curve_fit(), c.field, txs, probes)) << '\n';
      out.extra.push_back(path);
      break;
    }
    case ExperimentKind::MismatchSweep: {
      const SharingInstance truth = make_instance(c, est.truth());
      const SharingInstance planning = make_instance(c, est.get(default_est));
      const SchemeOutcome o = run_scheme(Scheme::Proposed, planning, truth, c.run, c.run.seed);
      if (o.status != "ok" && o.status != "not_converged") {
        throw InfeasibleError("mismatch_sweep: base allocation failed: " + o.message);
      }
      const auto delays = or_default(c.sweep.delay_errors_s, 0.0);
      const auto dopplers = or_default(c.sweep.doppler_errors_hz, 0.0);
      std::vector<MismatchError> errors;
      for (double d : delays) {
        for (double f : dopplers) errors.push_back({d, f});
      }
      const ChirpParams chirp{c.waveform.pulse_duration_s, c.waveform.bandwidth_hz, ChirpDirection::Up};
      const auto rows = mismatch_sinr_sweep(c.topology, truth.csi, c.limits, o.alloc, chirp, errors);
      write_mismatch_csv(rows, out.results.string());
      out.rows = rows.size();
      return out;
    }
  }

  const auto rows = run_jobs(c, est, jobs);
  write_results(out.results, kind, c.run.seed, rows);
  out.rows = rows.size();
  return out;
}

void emit_plotdata(const std::filesystem::path& results, const std::filesystem::path& out) {
  std::ifstream in(results);
  if (!in) throw InvalidArgument("cannot open results " + results.string());
  std::string header;
  const std::string kind_name = file_kind(in, header);
  if (kind_name.empty()) throw InvalidArgument(results.string() + ": unknown experiment kind");
  const ExperimentKind kind = parse_experiment(kind_name);

  auto os = open_out(out);
  os << "x,series,y\n";
  std::string line;
  if (kind == ExperimentKind::MismatchSweep) {
    while (std::getline(in, line)) {
      const auto f = split_csv(line);
      if (f.size() != 5) continue;
      os << f[2] << ",dtau=" << f[0] << " dfd=" << f[1] << ',' << f[4] << '\n';
    }
    return;
  }
  if (header != kResultsHeader) throw InvalidArgument(results.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  bool mixed_estimators = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv(line);
    if (f.size() != 11) throw InvalidArgument(results.string() + ": malformed row '" + line + "'");
    if (!rows.empty() && rows.front()[2] != f[2]) mixed_estimators = true;
    rows.push_back(std::move(f));
  }
  auto scored = [](const std::vector<std::string>& f) { return f[8] == "ok" || f[8] == "not_converged"; };
  if (kind == ExperimentKind::ConvergenceHistogram) {
    std::map<std::pair<std::string, long>, int> counts;
    for (const auto& f : rows) {
      if (scored(f)) ++counts[{f[1], std::stol(f[9])}];
    }
    for (const auto& [key, n] : counts) os << key.second << ',' << key.first << ',' << n << '\n';
    return;
  }
  for (const auto& f : rows) {
    if (!scored(f)) continue;
    const std::string series = mixed_estimators ? f[1] + "/" + f[2] : f[1];
    os << f[0] << ',' << series << ',' << f[5] << '\n';
  }
}

SolveOutput solve_scenario(const ScenarioConfig& c, EstimatorKind estimator, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SolveOutput out;
  const std::unique_ptr<EstimatorSet> est =
      estimator == EstimatorKind::Truth ? nullptr : std::make_unique<EstimatorSet>(c);
  const GroundTruthEstimator truth_est(c.field);
  const SharingInstance truth = make_instance(c, truth_est);
  const SharingInstance planning = est ? make_instance(c, est->get(estimator)) : truth;
  out.outcome = run_scheme(Scheme::Proposed, planning, truth, c.run, c.run.seed);
  if (out.outcome.status == "infeasible" || out.outcome.status == "error") {
    throw InfeasibleError(out.outcome.message);
  }
  out.solution = out_dir / "solution.csv";
  out.trace = out_dir / "trace.csv";
  {
    auto os = open_out(out.solution);
    os << "element,power_w\n";
    for (std::size_t j = 0; j < out.outcome.alloc.p_c.size(); ++j) os << bs_id(j) << ',' << num(out.outcome.alloc.p_c[j]) << '\n';
    for (std::size_t i = 0; i < out.outcome.alloc.p_r.size(); ++i) {
      os << radar_id(i) << ',' << num(out.outcome.alloc.p_r[i]) << '\n';
    }
  }
  write_trace_csv(out.outcome.report, out.trace.string());
  return out;
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

std::vector<CheckResult> validate_scenario(const ScenarioConfig& c,
                                           const std::function<void(const CheckResult&)>& on_result) {
  std::vector<CheckResult> results;
  auto report = [&](std::string name, bool pass, std::string detail) {
    results.push_back({std::move(name), pass, std::move(detail)});
    if (on_result) on_result(results.back());
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report(name, false, e.what());
    }
  };

  const GroundTruthEstimator truth_est(c.field);
  const SharingInstance inst = make_instance(c, truth_est);
  const Limits& lim = inst.limits;
  PowerAllocation eq{equal_split(lim.p_csum, lim.p_cmax, inst.num_bs()),
                     equal_split(lim.p_rsum, lim.p_rmax, inst.num_radars())};

  guarded("fixed_point", [&] {
    const FixedPoint fp = solve_fixed_point(eq, inst.csi, inst.user_antennas, lim.noise_power);
    report("fixed_point", fp.residual <= kFixedPointTol && fp.v_star >= 1.0,
           "v*=" + num(fp.v_star) + " residual=" + num(fp.residual));
  });
  guarded("deterministic_equivalent", [&] {
    const double ap = ergodic_rate_approx(eq, inst.csi, inst.user_antennas, lim.noise_power);
    const double mc =
        ergodic_rate_mc(eq, inst.csi, inst.user_antennas, lim.noise_power, c.run.mc_samples, c.run.seed, 1).mean;
    report("deterministic_equivalent", std::abs(ap - mc) <= 0.1 * mc, "R_ap=" + num(ap) + " MC=" + num(mc));
  });
  guarded("aux_g_increasing", [&] {
    const auto a = link_snrs(eq, inst.csi, lim.noise_power);
    bool ok = true;
    for (double z : {1.0, 1.5, 2.0, 4.0, 16.0}) ok = ok && aux_g_derivative(a, inst.user_antennas, z) > 0.0;
    report("aux_g_increasing", ok, "dg/dz > 0 on z in {1, 1.5, 2, 4, 16}");
  });
  guarded("quadratic_transform", [&] {
    const auto beta = beta_update(eq, inst);
    double worst = 0.0;
    for (std::size_t i = 0; i < inst.num_radars(); ++i) {
      const double s = radar_sinr(eq, inst.csi, i, lim.noise_power);
      worst = std::max(worst, std::abs(quadratic_transform_value(eq, inst, i, beta[i]) - s) / s);
    }
    report("quadratic_transform", worst <= 1e-12, "max relative gap " + num(worst));
  });
  guarded("detection", [&] {
    const double mu = detection_threshold(lim.false_alarm_prob, lim.pulses_per_cpi);
    const double pf = detection_probability(0.0, mu, lim.pulses_per_cpi);
    report("detection", std::abs(pf - lim.false_alarm_prob) <= 1e-12 * lim.false_alarm_prob,
           "mu=" + num(mu) + " P_D(0)=" + num(pf));
  });
  guarded("ambiguity_origin", [&] {
    const ChirpParams p{c.waveform.pulse_duration_s, c.waveform.bandwidth_hz, ChirpDirection::Up};
    const double v = ambiguity_numeric(p, p, 0.0, 0.0);
    report("ambiguity_origin", std::abs(v - 1.0) <= 1e-9, "chi(0,0)=" + num(v));
  });

  std::optional<AllocationResult> solved;
  guarded("algorithm1", [&] {
    AllocateOptions opt;
    opt.epsilon = c.run.epsilon;
    opt.max_iter = c.run.max_iter;
    opt.coupling_uses_num_bs = c.run.coupling_uses_num_bs;
    solved = allocate(inst, opt);
    const auto& tr = solved->report.gamma_trace;
    bool mono = true;
    for (std::size_t k = 1; k < tr.size(); ++k) mono = mono && tr[k] >= tr[k - 1] - 1e-8;
    report("trace_monotone", mono, std::to_string(tr.size()) + " iterations");
    report("converged", solved->report.converged, std::to_string(solved->report.iterations) + " iterations");
    const auto viol = validate_allocation(solved->alloc, lim, inst.num_bs(), inst.num_radars());
    report("power_limits", viol.empty(), viol.empty() ? "all limits met" : viol.front().what);
    report("rate_constraint", solved->report.rate_achieved >= lim.r_req - 1e-6,
           "R_ap=" + num(solved->report.rate_achieved) + " R_req=" + num(lim.r_req));
  });
  if (solved) {
    guarded("dominance", [&] {
      const double g = solved->report.min_sinr;
      for (BackoffRule rule : {BackoffRule::EqualBackoff, BackoffRule::ChannelPriority}) {
        BaselineOptions opt;
        opt.step_w = c.run.step_w;
        opt.rule = rule;
        const BaselineResult b = algorithm2(inst, opt);
        report(std::string("dominates_") + to_string(rule), g >= b.min_sinr - 1e-6,
               "proposed " + num(g) + " vs " + num(b.min_sinr));
      }
    });
  }
  return results;
}

} // namespace rmshare
