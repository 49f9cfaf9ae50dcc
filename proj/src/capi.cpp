// SPDX-License-Identifier: Apache-2.0
#include "rmshare/rmshare.h"

#include <cstring>
#include <string>

#include "rmshare/errors.hpp"
#include "rmshare/experiments.hpp"
#include "rmshare/metrics.hpp"

struct rms_scenario {
  rmshare::ScenarioConfig config;
};

struct rms_solution {
  rmshare::SchemeOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

rms_status fail(rms_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
rms_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return RMS_OK;
  } catch (const rmshare::ConfigError& e) {
    return fail(RMS_ERR_CONFIG, e.what());
  } catch (const rmshare::InvalidArgument& e) {
    return fail(RMS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const rmshare::InfeasibleError& e) {
    return fail(RMS_ERR_INFEASIBLE, e.what());
  } catch (const rmshare::NumericalError& e) {
    return fail(RMS_ERR_NUMERICAL, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(RMS_ERR_IO, e.what());
  } catch (const rmshare::Error& e) {
    return fail(RMS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(RMS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RMS_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw rmshare::InvalidArgument(std::string(what) + " must not be null");
}

} // namespace

extern "C" {

const char* rms_version(void) { return "0.1.0"; }

const char* rms_last_error(void) { return g_last_error.c_str(); }

const char* rms_status_name(rms_status status) {
  switch (status) {
    case RMS_OK: return "ok";
    case RMS_ERR_CONFIG: return "config error";
    case RMS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RMS_ERR_INFEASIBLE: return "infeasible";
    case RMS_ERR_NUMERICAL: return "numerical failure";
    case RMS_ERR_IO: return "i/o error";
    case RMS_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

rms_status rms_scenario_load(const char* path, rms_scenario** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new rms_scenario{rmshare::load_config(path)};
  });
}

rms_status rms_scenario_parse(const char* text, rms_scenario** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new rms_scenario{rmshare::parse_config(text)};
  });
}

void rms_scenario_free(rms_scenario* scenario) { delete scenario; }

rms_status rms_scenario_counts(const rms_scenario* scenario, size_t* num_bs, size_t* num_radars) {
  return guard([&] {
    require(scenario, "scenario");
    if (num_bs) *num_bs = scenario->config.topology.num_bs();
    if (num_radars) *num_radars = scenario->config.topology.num_radars();
  });
}

rms_status rms_scenario_set_seed(rms_scenario* scenario, uint64_t seed) {
  return guard([&] {
    require(scenario, "scenario");
    scenario->config.run.seed = seed;
  });
}

rms_status rms_solve(const rms_scenario* scenario, const char* estimator, const char* out_dir, rms_solution** out) {
  return guard([&] {
    require(scenario, "scenario");
    require(out_dir, "out_dir");
    require(out, "out");
    const auto kind = rmshare::parse_estimator(estimator ? estimator : scenario->config.run.estimator.c_str());
    auto result = rmshare::solve_scenario(scenario->config, kind, out_dir);
    *out = new rms_solution{std::move(result.outcome)};
  });
}

void rms_solution_free(rms_solution* solution) { delete solution; }

rms_status rms_solution_powers(const rms_solution* solution, double* p_c, size_t num_bs, double* p_r,
                               size_t num_radars) {
  return guard([&] {
    require(solution, "solution");
    const auto& a = solution->outcome.alloc;
    if (num_bs != a.p_c.size() || num_radars != a.p_r.size()) {
      throw rmshare::InvalidArgument("rms_solution_powers: buffer sizes do not match the scenario");
    }
    if (p_c) std::memcpy(p_c, a.p_c.data(), num_bs * sizeof(double));
    if (p_r) std::memcpy(p_r, a.p_r.data(), num_radars * sizeof(double));
  });
}

rms_status rms_solution_summary(const rms_solution* solution, rms_summary* out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    const auto& o = solution->outcome;
    *out = rms_summary{o.gamma, o.min_sinr_db, o.pd, o.rate_ap, o.rate_mc, o.iters, o.report.converged ? 1 : 0};
  });
}

size_t rms_solution_trace_length(const rms_solution* solution) {
  return solution ? solution->outcome.report.gamma_trace.size() : 0;
}

rms_status rms_solution_trace(const rms_solution* solution, size_t index, double* gamma, double* rate_ap) {
  return guard([&] {
    require(solution, "solution");
    const auto& r = solution->outcome.report;
    if (index >= r.gamma_trace.size()) throw rmshare::InvalidArgument("rms_solution_trace: index out of range");
    if (gamma) *gamma = r.gamma_trace[index];
    if (rate_ap) *rate_ap = r.rate_trace[index];
  });
}

rms_status rms_run_experiment(const rms_scenario* scenario, const char* kind, const char* out_dir, char* path_buf,
                              size_t buf_size) {
  return guard([&] {
    require(scenario, "scenario");
    require(kind, "kind");
    require(out_dir, "out_dir");
    const auto out = rmshare::run_experiment(scenario->config, rmshare::parse_experiment(kind), out_dir);
    if (path_buf && buf_size > 0) {
      const std::string p = out.results.string();
      std::strncpy(path_buf, p.c_str(), buf_size - 1);
      path_buf[buf_size - 1] = '\0';
    }
  });
}

rms_status rms_emit_plotdata(const char* results_path, const char* out_path) {
  return guard([&] {
    require(results_path, "results_path");
    require(out_path, "out_path");
    rmshare::emit_plotdata(results_path, out_path);
  });
}

rms_status rms_validate(const rms_scenario* scenario, rms_check_callback callback, void* user, int* all_passed) {
  return guard([&] {
    require(scenario, "scenario");
    const auto results = rmshare::validate_scenario(scenario->config, [&](const rmshare::CheckResult& r) {
      if (callback) callback(r.name.c_str(), r.pass ? 1 : 0, r.detail.c_str(), user);
    });
    bool ok = true;
    for (const auto& r : results) ok = ok && r.pass;
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

rms_status rms_export_map(const rms_scenario* scenario, const char* tx_id, const char* out_path) {
  return guard([&] {
    require(scenario, "scenario");
    require(tx_id, "tx_id");
    require(out_path, "out_path");
    const rmshare::EstimatorSet est(scenario->config);
    const auto& grids = est.grid().map().grids;
    const auto it = grids.find(tx_id);
    if (it == grids.end()) throw rmshare::InvalidArgument(std::string("no map for transmitter '") + tx_id + "'");
    rmshare::export_grid_csv(it->second, out_path);
  });
}

rms_status rms_detection_threshold(double p_fa, int pulses, double* mu) {
  return guard([&] {
    require(mu, "mu");
    *mu = rmshare::detection_threshold(p_fa, pulses);
  });
}

rms_status rms_detection_probability(double rho, double mu, int pulses, double* pd) {
  return guard([&] {
    require(pd, "pd");
    *pd = rmshare::detection_probability(rho, mu, pulses);
  });
}

} // extern "C"
