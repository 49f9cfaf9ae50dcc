// SPDX-License-Identifier: Apache-2.0
#include "rmshare/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rmshare/errors.hpp"
#include "rmshare/metrics.hpp"

namespace rmshare {

namespace {

double rate_of(const PowerAllocation& alloc, const SharingInstance& inst) {
  return ergodic_rate_approx(alloc, inst.csi, inst.user_antennas, inst.limits.noise_power);
}

// Removes `step` watts from `p`, split by `weights` (summing to 1), never going below zero.
void back_off(std::vector<double>& p, std::span<const double> weights, double step) {
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::max(0.0, p[k] - step * weights[k]);
}

std::vector<double> radar_weights(const PowerAllocation& alloc, const SharingInstance& inst, BackoffRule rule) {
  const std::size_t mr = alloc.p_r.size();
  std::vector<double> w(mr, 1.0 / static_cast<double>(mr));
  if (rule == BackoffRule::ChannelPriority) {
    for (std::size_t i = 0; i < mr; ++i) w[i] = inst.csi.l_r_to_c[i] * alloc.p_r[i];
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) return std::vector<double>(mr, 0.0);
    for (double& v : w) v /= total;
  }
  return w;
}

std::vector<double> bs_weights(const PowerAllocation& alloc, const SharingInstance& inst, BackoffRule rule) {
  const std::size_t mc = alloc.p_c.size();
  std::vector<double> w(mc, 1.0 / static_cast<double>(mc));
  if (rule == BackoffRule::ChannelPriority) {
    for (std::size_t j = 0; j < mc; ++j) w[j] = inst.csi.l_c_to_r.row(static_cast<Eigen::Index>(j)).sum() * alloc.p_c[j];
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) return std::vector<double>(mc, 0.0);
    for (double& v : w) v /= total;
  }
  return w;
}

bool all_zero(const std::vector<double>& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v <= 0.0; });
}

BaselineResult finish(PowerAllocation alloc, long steps, const SharingInstance& inst) {
  BaselineResult r;
  r.rate = rate_of(alloc, inst);
  r.min_sinr = min_radar_sinr(alloc, inst.csi, inst.limits.noise_power);
  r.alloc = std::move(alloc);
  r.steps = steps;
  return r;
}

} // namespace

const char* to_string(BackoffRule rule) {
  return rule == BackoffRule::EqualBackoff ? "equal_backoff" : "channel_priority";
}

BaselineResult algorithm2(const SharingInstance& inst, const BaselineOptions& options) {
  validate_instance(inst);
  if (!(options.step_w > 0.0)) throw InvalidArgument("algorithm2: step_w must be positive");
  const Limits& lim = inst.limits;

  PowerAllocation alloc;
  alloc.p_c = equal_split(lim.p_csum, lim.p_cmax, inst.num_bs());
  alloc.p_r = equal_split(lim.p_rsum, lim.p_rmax, inst.num_radars());

  for (long step = 0; step < options.max_steps; ++step) {
    const double rate = rate_of(alloc, inst);
    if (rate == lim.r_req) return finish(alloc, step, inst);
    PowerAllocation next = alloc;
    if (rate < lim.r_req) {
      if (all_zero(alloc.p_r)) {
        std::ostringstream os;
        os << "algorithm2: R_req = " << lim.r_req << " unreachable; rate with radars off is " << rate;
        throw InfeasibleError(os.str());
      }
      back_off(next.p_r, radar_weights(alloc, inst, options.rule), options.step_w);
      if (next.p_r == alloc.p_r) throw NumericalError("algorithm2: radar backoff made no progress");
      if (rate_of(next, inst) >= lim.r_req) return finish(next, step + 1, inst);
    } else {
      back_off(next.p_c, bs_weights(alloc, inst, options.rule), options.step_w);
      if (next.p_c == alloc.p_c) return finish(alloc, step, inst);
      // Crossing downward: the current point is the last one meeting the rate target.
      if (rate_of(next, inst) <= lim.r_req) {
        return rate_of(next, inst) >= lim.r_req ? finish(next, step + 1, inst) : finish(alloc, step, inst);
      }
    }
    alloc = std::move(next);
  }
  throw NumericalError("algorithm2: step budget exhausted");
}

GridSearchResult grid_search_oracle(const SharingInstance& inst, int resolution) {
  validate_instance(inst);
  const std::size_t mc = inst.num_bs(), mr = inst.num_radars();
  const std::size_t dims = mc + mr;
  if (dims > kGridSearchMaxDims) {
    throw InvalidArgument("grid_search_oracle: M_c + M_r = " + std::to_string(dims) + " exceeds " +
                          std::to_string(kGridSearchMaxDims));
  }
  if (resolution < 10) throw InvalidArgument("grid_search_oracle: resolution must be >= 10");
  const Limits& lim = inst.limits;
  const double rtol = kFeasibilityTol;

  auto axis_value = [&](std::size_t d, int k) {
    const double cap = d < mc ? lim.p_cmax : lim.p_rmax;
    return k == resolution ? cap : cap * static_cast<double>(k) / static_cast<double>(resolution);
  };

  GridSearchResult best;
  best.gamma = -1.0;
  std::vector<int> idx(dims, 0);
  PowerAllocation alloc{std::vector<double>(mc), std::vector<double>(mr)};
  while (true) {
    double sc = 0.0, sr = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double v = axis_value(d, idx[d]);
      if (d < mc) {
        alloc.p_c[d] = v;
        sc += v;
      } else {
        alloc.p_r[d - mc] = v;
        sr += v;
      }
    }
    if (sc <= lim.p_csum * (1.0 + rtol) && sr <= lim.p_rsum * (1.0 + rtol)) {
      ++best.evaluated;
      if (rate_of(alloc, inst) >= lim.r_req) {
        ++best.feasible;
        const double g = min_radar_sinr(alloc, inst.csi, lim.noise_power);
        if (g > best.gamma) {
          best.gamma = g;
          best.alloc = alloc;
        }
      }
    }
    std::size_t d = 0;
    while (d < dims && ++idx[d] > resolution) idx[d++] = 0;
    if (d == dims) break;
  }
  if (best.feasible == 0) throw InfeasibleError("grid_search_oracle: no grid point meets R_req");
  return best;
}

} // namespace rmshare
