// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmshare/barrier.hpp"
#include "rmshare/channel.hpp"
#include "rmshare/scenario.hpp"

namespace rmshare {

/// Everything the power-allocation routines read: budgets, receiver size and large-scale CSI.
struct SharingInstance {
  Limits limits;
  LargeScaleCsi csi;
  int user_antennas = 1;

  std::size_t num_bs() const { return csi.num_bs(); }
  std::size_t num_radars() const { return csi.num_radars(); }
};

void validate_instance(const SharingInstance& inst);

/// Which power vectors the iterative allocator may change. The frozen side sits at its equal split.
enum class Variant { Joint, CommOnly, RadarOnly };

const char* to_string(Variant v);

/// Smallest admissible power; keeps ln(p) and sqrt(p) differentiable inside the barrier.
inline constexpr double kPowerFloor = 1e-12;

struct IterationState {
  PowerAllocation alloc;
  double z = 1.0;
  std::vector<double> t;
  std::vector<double> beta;
  double gamma = 0.0;
  int iteration = 0;
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// beta*_i = sqrt(|h_rr,i|^2 p_ri) / sigma_r^2(P_c).
std::vector<double> beta_update(const PowerAllocation& alloc, const SharingInstance& inst);

/// Quadratic-transform surrogate 2 beta sqrt(|h|^2 p_ri) - beta^2 sigma_r^2(P_c) of radar `radar`.
double quadratic_transform_value(const PowerAllocation& alloc, const SharingInstance& inst, std::size_t radar,
                                 double beta);

/// Affine-in-t minorant of G(z, t) anchored at t_prev:
/// value = -log2(e) sum_j (t_prev_j (1 - t_j)/(1 - t_prev_j) + ln(1 - t_prev_j)) + N_c log2 z.
struct LinearizedG {
  std::vector<double> t_prev;
  int user_antennas = 1;

  double value(double z, std::span<const double> t) const;
  /// d/dt_j (constant in t).
  std::vector<double> gradient_t() const;
  double derivative_z(double z) const;
};

LinearizedG linearize_G(std::span<const double> t_prev, int user_antennas);

/// First-order upper bound of ln t_j + ln z + ln sigma_c^2(P_r) around an anchor.
struct LinearizedLogSum {
  double t_prev = 0.0;
  double z_prev = 1.0;
  std::vector<double> p_r_prev;
  std::vector<double> l_r_to_c;
  double sigma_c2_prev = 0.0;

  double value(double t, double z, std::span<const double> p_r) const;
  double derivative_t() const { return 1.0 / t_prev; }
  double derivative_z() const { return 1.0 / z_prev; }
  double derivative_p_r(std::size_t i) const { return l_r_to_c[i] / sigma_c2_prev; }
};

LinearizedLogSum linearize_log_constraint(double t_prev, double z_prev, std::span<const double> p_r_prev,
                                          const LargeScaleCsi& csi, double noise_power);

/// Variable slot of one scalar in a convex subproblem: either a program variable or a constant.
struct Slot {
  int var = -1;
  double value = 0.0;
  bool free() const { return var >= 0; }
};

struct Subproblem {
  convex::Program program;
  std::vector<Slot> p_c;
  std::vector<Slot> p_r;
  int z = -1;
  std::vector<int> t;
  int gamma = -1; // objective variable (min-SINR epigraph, or rate epigraph for the probe)
  Eigen::VectorXd start;
};

struct SubproblemOptions {
  Variant variant = Variant::Joint;
  /// Coefficient of sum(t) in the z/t coupling row: 1/N_c by default, 1/M_c as the alternative.
  bool coupling_uses_num_bs = false;
};

/// Convex program solved at one allocator iteration. Throws InfeasibleError for an anchor the
/// Taylor expansions cannot be taken at (t outside (0, 1), z < 1).
Subproblem build_subproblem(const IterationState& state, const SharingInstance& inst,
                            const SubproblemOptions& options = {});

struct SubproblemSolution {
  PowerAllocation alloc;
  double z = 1.0;
  std::vector<double> t;
  double objective = 0.0;
  convex::SolveStatus status = convex::SolveStatus::NumericalFailure;
  int newton_steps = 0;
};

SubproblemSolution solve_subproblem(const Subproblem& sub, const convex::BarrierOptions& options = {});

/// Reads the powers/z/t encoded in `x` for the given layout.
SubproblemSolution decode(const Subproblem& sub, const Eigen::VectorXd& x);
Eigen::VectorXd encode(const Subproblem& sub, const PowerAllocation& alloc, double z, std::span<const double> t,
                       double objective);

// ---------------------------------------------------------------------------
// Iterative allocator
// ---------------------------------------------------------------------------

struct AllocateOptions {
  double epsilon = 1e-3;
  int max_iter = 100;
  Variant variant = Variant::Joint;
  bool coupling_uses_num_bs = false;
  convex::BarrierOptions barrier;
};

struct SolveReport {
  std::vector<double> gamma_trace; // surrogate objective per iteration
  std::vector<double> rate_trace;  // R_ap per iteration
  std::vector<double> min_sinr_trace;
  std::vector<convex::SolveStatus> subproblem_status;
  int iterations = 0;
  bool converged = false;
  bool fallback_anchor = false;
  double rate_achieved = 0.0;
  double min_sinr = 0.0;
};

struct AllocationResult {
  PowerAllocation alloc;
  SolveReport report;
};

/// Iterative large-scale-CSI power allocation (quadratic transform + successive convex
/// approximation). Throws InfeasibleError when R_req exceeds the probe maximum and
/// NumericalError when a subproblem fails (message carries the iteration).
AllocationResult allocate(const SharingInstance& inst, const AllocateOptions& options = {});

/// Trace serialisation: `iteration,gamma,rate_ap`.
void write_trace_csv(const SolveReport& report, const std::string& path);

struct ProbeResult {
  double rate = 0.0;
  std::vector<double> p_c;
  int iterations = 0;
};

/// Largest deterministic-equivalent rate reachable with P_r held at `p_r` (zeros by default).
ProbeResult feasibility_probe(const SharingInstance& inst, std::optional<std::vector<double>> p_r = std::nullopt);

/// Powers actually fed to the subproblem floor for the given side.
double power_floor(double cap, double budget, std::size_t count);

} // namespace rmshare
