// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rmshare/channel.hpp"
#include "rmshare/scenario.hpp"

namespace rmshare {

struct RunConfig {
  std::uint64_t seed = 1;
  long mc_samples = 10'000;
  std::string estimator = "truth"; // truth | grid | curvefit
  int workers = 0;                 // 0: hardware concurrency
  double epsilon = 1e-3;
  int max_iter = 100;
  double step_w = 0.5;
  bool coupling_uses_num_bs = false;
};

struct MapConfig {
  double sample_spacing_m = 25.0;
  double cell_m = 25.0;
  double margin_m = 100.0;
  std::string dataset; // optional CSV; empty means sample the field
};

struct WaveformConfig {
  double pulse_duration_s = 2e-6;
  double bandwidth_hz = 5e6;
};

struct SweepConfig {
  std::vector<double> rreq;
  std::vector<std::string> schemes;
  std::vector<double> pcsum_w;
  std::vector<double> prsum_w;
  std::vector<double> beamwidths_deg;
  std::vector<double> delay_errors_s;
  std::vector<double> doppler_errors_hz;
  int placements = 100;
};

struct ScenarioConfig {
  Topology topology;
  Limits limits;
  PropagationField field;
  AntennaPattern antenna;
  RadioParams radio;
  RunConfig run;
  MapConfig map;
  WaveformConfig waveform;
  SweepConfig sweep;
  std::string source; // file name or "<string>"
};

/// Parses the TOML subset used by scenario files: [sections], `key = value`, numbers, strings,
/// booleans and (nested) arrays, `#` comments. Unknown sections or keys are errors. Every error
/// names the offending key and line.
ScenarioConfig parse_config(std::string_view text, const std::string& source = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

} // namespace rmshare
