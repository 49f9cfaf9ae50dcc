// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rmshare {

struct Position {
  double x = 0.0; // m
  double y = 0.0; // m
};

double distance(Position a, Position b);

struct Topology {
  std::vector<Position> bs_positions;
  std::vector<Position> radar_positions;
  Position user_position;
  Position target_position;
  int user_antennas = 1; // N_c

  std::size_t num_bs() const { return bs_positions.size(); }
  std::size_t num_radars() const { return radar_positions.size(); }
};

struct Limits {
  double p_cmax = 0.0; // W, per BS
  double p_rmax = 0.0; // W, per radar
  double p_csum = 0.0; // W
  double p_rsum = 0.0; // W
  double r_req = 0.0;  // bits/s/Hz
  double noise_power = 0.0; // W
  int pulses_per_cpi = 2;
  double false_alarm_prob = 1e-4;
};

struct PowerAllocation {
  std::vector<double> p_c;
  std::vector<double> p_r;
};

/// Transmit-power layout used by the iterative allocator (BS side) and the back-off baseline (both sides):
/// min(budget / count, per-element cap) on every element.
std::vector<double> equal_split(double budget, double cap, std::size_t count);

// Unit conversions. Internal computation is linear; dB only at the boundaries.
double db_to_linear(double db);
double linear_to_db(double ratio);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct Violation {
  std::string what;
  double value = 0.0;
  double limit = 0.0;
};

/// Relative feasibility tolerance for power constraints.
inline constexpr double kFeasibilityTol = 1e-9;

/// Lists every box and budget violation of `alloc` against `limits`.
/// Throws InvalidArgument when the vector lengths differ from the expected counts.
std::vector<Violation> validate_allocation(const PowerAllocation& alloc, const Limits& limits,
                                           std::size_t num_bs, std::size_t num_radars);

void validate_topology(const Topology& topo);
void validate_limits(const Limits& limits);

} // namespace rmshare
