// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmshare/channel.hpp"
#include "rmshare/scenario.hpp"

namespace rmshare {

// ---------------------------------------------------------------------------
// Radar side
// ---------------------------------------------------------------------------

/// sigma_r^2(P_c) for radar `radar`: BS leakage plus noise.
double radar_interference(std::span<const double> p_c, const LargeScaleCsi& csi, std::size_t radar,
                          double noise_power);

/// Ideal-orthogonality SINR rho_i = p_ri |h_rr,i|^2 / sigma_r^2(P_c).
double radar_sinr(const PowerAllocation& alloc, const LargeScaleCsi& csi, std::size_t radar,
                  double noise_power);

double min_radar_sinr(const PowerAllocation& alloc, const LargeScaleCsi& csi, double noise_power);

/// SINR with matched-filter ambiguity weights. `chi_auto` is |chi_ii|, `chi_cross[j]` is |chi_ji|
/// (entry `radar` is ignored). Cross-radar echoes enter through csi.l_r_to_r.
double radar_sinr_with_ambiguity(const PowerAllocation& alloc, const LargeScaleCsi& csi,
                                 std::size_t radar, double noise_power, double chi_auto,
                                 std::span<const double> chi_cross);

/// mu = 1 - P_F^(1/(N-1)).
double detection_threshold(double p_fa, int pulses);
double false_alarm_probability(double mu, int pulses);
double detection_probability(double rho, double mu, int pulses);

// ---------------------------------------------------------------------------
// Communication side
// ---------------------------------------------------------------------------

/// sigma_c^2(P_r): radar leakage at the user plus noise (per receive antenna).
double comm_interference(std::span<const double> p_r, std::span<const double> l_r_to_c,
                         double noise_power);

struct RateEstimate {
  double mean = 0.0;      // bits/s/Hz
  double std_error = 0.0; // of the mean
};

/// Monte Carlo ergodic rate E log2 det(I + H^H P_c H / sigma_c^2), H = L_c^{1/2} S_c.
/// Samples are split in fixed chunks with one seeded substream each, so the estimate does not
/// depend on `workers`.
RateEstimate ergodic_rate_mc(const PowerAllocation& alloc, const LargeScaleCsi& csi, int user_antennas,
                             double noise_power, long samples, std::uint64_t seed, int workers = 1);

/// Same estimator with an explicit interference-plus-noise level (common random numbers across calls).
RateEstimate ergodic_rate_mc(std::span<const double> p_c, std::span<const double> l_c, double sigma_c2,
                             int user_antennas, long samples, std::uint64_t seed, int workers = 1);

/// Per-BS received SNR a_j = l_cj p_cj / sigma_c^2: the only quantities the deterministic
/// equivalent depends on.
std::vector<double> link_snrs(const PowerAllocation& alloc, const LargeScaleCsi& csi, double noise_power);

struct FixedPoint {
  double v_star = 1.0;
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kFixedPointTol = 1e-12;

/// Root of 1 - 1/v = sum_j a_j / (v + N_c a_j), by bisection then Newton polish.
FixedPoint solve_fixed_point(std::span<const double> snrs, int user_antennas, double tol = kFixedPointTol);
FixedPoint solve_fixed_point(const PowerAllocation& alloc, const LargeScaleCsi& csi, int user_antennas,
                             double noise_power, double tol = kFixedPointTol);

/// 1 - 1/v - sum_j a_j / (v + N_c a_j); increasing in v.
double fixed_point_residual(std::span<const double> snrs, int user_antennas, double v);

/// Deterministic-equivalent rate R_ap.
double ergodic_rate_approx(std::span<const double> snrs, int user_antennas);
double ergodic_rate_approx(const PowerAllocation& alloc, const LargeScaleCsi& csi, int user_antennas,
                           double noise_power);

/// t*_j = N_c a_j / (z + N_c a_j).
std::vector<double> t_star(std::span<const double> snrs, int user_antennas, double z);

/// Auxiliary function g(z); equals R_ap at z = v*.
double aux_g(std::span<const double> snrs, int user_antennas, double z);

/// dg/dz = log2(e)/z * (N_c - sum_j t*_j(z)^2).
double aux_g_derivative(std::span<const double> snrs, int user_antennas, double z);

/// G(z, t) = -log2(e) sum_j (t_j + ln(1 - t_j)) + N_c log2 z. Throws InvalidArgument for t_j >= 1.
double aux_G(double z, std::span<const double> t, int user_antennas);

} // namespace rmshare
