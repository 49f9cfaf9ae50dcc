// SPDX-License-Identifier: Apache-2.0
#include "rmshare/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rmshare/errors.hpp"

namespace rmshare {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<double> equal_split(double budget, double cap, std::size_t count) {
  if (count == 0) return {};
  return std::vector<double>(count, std::min(budget / static_cast<double>(count), cap));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }
double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }
double watts_to_dbm(double watts) { return linear_to_db(watts) + 30.0; }

namespace {

bool exceeds(double value, double limit) { return value > limit * (1.0 + kFeasibilityTol); }

void check_vector(std::vector<Violation>& out, const std::vector<double>& p, double cap, double budget,
                  const char* side) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += p[i];
    if (p[i] < -kFeasibilityTol * cap) {
      out.push_back({std::string(side) + "[" + std::to_string(i) + "] < 0", p[i], 0.0});
    } else if (exceeds(p[i], cap)) {
      out.push_back({std::string(side) + "[" + std::to_string(i) + "] > max", p[i], cap});
    }
  }
  if (exceeds(sum, budget)) out.push_back({std::string("sum(") + side + ") > budget", sum, budget});
}

} // namespace

std::vector<Violation> validate_allocation(const PowerAllocation& alloc, const Limits& limits,
                                           std::size_t num_bs, std::size_t num_radars) {
  if (alloc.p_c.size() != num_bs || alloc.p_r.size() != num_radars) {
    std::ostringstream msg;
    msg << "allocation dimensions (" << alloc.p_c.size() << ", " << alloc.p_r.size()
        << ") do not match topology (" << num_bs << ", " << num_radars << ")";
    throw InvalidArgument(msg.str());
  }
  std::vector<Violation> out;
  check_vector(out, alloc.p_c, limits.p_cmax, limits.p_csum, "p_c");
  check_vector(out, alloc.p_r, limits.p_rmax, limits.p_rsum, "p_r");
  return out;
}

void validate_topology(const Topology& topo) {
  if (topo.bs_positions.empty()) throw ConfigError("topology.bs: at least one base station required");
  if (topo.radar_positions.empty()) throw ConfigError("topology.radars: at least one radar required");
  if (topo.user_antennas < static_cast<int>(topo.bs_positions.size())) {
    throw ConfigError("topology.nc: N_c >= M_c required (N_c = " + std::to_string(topo.user_antennas) +
                      ", M_c = " + std::to_string(topo.bs_positions.size()) + ")");
  }
  auto finite = [](Position p) { return std::isfinite(p.x) && std::isfinite(p.y); };
  bool ok = finite(topo.user_position) && finite(topo.target_position) &&
            std::all_of(topo.bs_positions.begin(), topo.bs_positions.end(), finite) &&
            std::all_of(topo.radar_positions.begin(), topo.radar_positions.end(), finite);
  if (!ok) throw ConfigError("topology: coordinates must be finite");
}

void validate_limits(const Limits& limits) {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("limits.") + key + ": must be > 0");
  };
  positive(limits.p_cmax, "p_cmax_w");
  positive(limits.p_rmax, "p_rmax_w");
  positive(limits.p_csum, "p_csum_w");
  positive(limits.p_rsum, "p_rsum_w");
  positive(limits.noise_power, "noise_dbm");
  if (!(limits.r_req >= 0.0) || !std::isfinite(limits.r_req)) {
    throw ConfigError("limits.r_req_bps_hz: must be >= 0");
  }
  if (limits.pulses_per_cpi < 2) throw ConfigError("limits.pulses_n: N >= 2 required");
  if (!(limits.false_alarm_prob > 0.0 && limits.false_alarm_prob < 1.0)) {
    throw ConfigError("limits.pfa: must lie in (0, 1)");
  }
}

} // namespace rmshare
