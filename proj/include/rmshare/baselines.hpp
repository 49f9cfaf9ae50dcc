// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "rmshare/optimizer.hpp"

namespace rmshare {

enum class BackoffRule { EqualBackoff, ChannelPriority };

const char* to_string(BackoffRule rule);

struct BaselineOptions {
  double step_w = 0.5; // Delta_P
  long max_steps = 1'000'000;
  BackoffRule rule = BackoffRule::ChannelPriority;
};

struct BaselineResult {
  PowerAllocation alloc;
  long steps = 0;
  double rate = 0.0;     // R_ap at the returned allocation
  double min_sinr = 0.0;
};

/// Step-wise power backoff from the equal split. Radar powers shrink while R_ap < R_req, BS powers
/// shrink while R_ap > R_req. Stops at the first step that crosses R_req and returns the side of
/// that step meeting the rate target. Throws InfeasibleError when R_req stays out of reach with
/// every radar off.
BaselineResult algorithm2(const SharingInstance& inst, const BaselineOptions& options = {});

inline constexpr std::size_t kGridSearchMaxDims = 4;

struct GridSearchResult {
  PowerAllocation alloc;
  double gamma = 0.0; // min radar SINR at alloc
  std::size_t evaluated = 0;
  std::size_t feasible = 0;
};

/// Exhaustive scan over p = k * cap / resolution, k = 0..resolution, per power element, keeping
/// points inside the sum budgets with R_ap >= R_req. Grids for resolution r and m*r are nested.
/// Throws InvalidArgument past kGridSearchMaxDims elements or below resolution 10, and
/// InfeasibleError when no grid point meets the rate target.
GridSearchResult grid_search_oracle(const SharingInstance& inst, int resolution);

} // namespace rmshare
