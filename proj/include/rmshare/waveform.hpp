// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "rmshare/channel.hpp"
#include "rmshare/scenario.hpp"

namespace rmshare {

enum class ChirpDirection { Up, Down };

/// Linear FM pulse on [0, tau]. Defaults give B * tau = 10.
struct ChirpParams {
  double pulse_duration = 2e-6; // s
  double bandwidth = 5e6;       // Hz
  ChirpDirection direction = ChirpDirection::Up;
};

void validate_chirp(const ChirpParams& p);

/// Unit-energy envelope; zero outside [0, tau].
std::complex<double> chirp_envelope(const ChirpParams& p, double t);

inline constexpr int kMinQuadraturePoints = 512;
inline constexpr int kDefaultQuadraturePoints = 4096;

/// |int u_a(v) conj(u_b(v - dtau)) exp(j 2 pi dfd v) dv| by composite Simpson over the support overlap.
double ambiguity_numeric(const ChirpParams& a, const ChirpParams& b, double delta_tau, double delta_fd,
                         int quadrature_points = kDefaultQuadraturePoints);

enum class AmbiguityKind { Auto, Cross };

/// Piecewise chirp ambiguity expressions in their original closed form (up-chirp u1 against
/// down-chirp u2 for Cross). The auto form keeps the variant with g = B/tau + dfd, which is not
/// normalised at the origin; use ambiguity_lfm for the standard form. The cross form's integral is
/// taken by quadrature and carries the 1/tau envelope normalisation. Requires |dtau| <= tau.
double ambiguity_chirp_closed(AmbiguityKind kind, const ChirpParams& p, double delta_tau, double delta_fd);

/// Textbook LFM self-ambiguity (1 - |dtau|/tau) |sinc((+-B dtau/tau + dfd)(tau - |dtau|))|.
double ambiguity_lfm(const ChirpParams& p, double delta_tau, double delta_fd);

struct MismatchError {
  double delay_error = 0.0;   // s
  double doppler_error = 0.0; // Hz
};

struct MismatchRow {
  double delta_tau_s = 0.0;
  double delta_fd_hz = 0.0;
  std::size_t radar = 0;
  double sinr = 0.0;
  double pd = 0.0;
};

/// Waveform of radar `index`: up-chirps on even indices, down-chirps on odd ones.
ChirpParams radar_waveform(const ChirpParams& base, std::size_t index);

/// Matched-filter SINR and detection probability of every radar under each delay/Doppler error.
/// Cross-radar echoes are evaluated at their geometric arrival offset (d_iT - d_jT)/c plus the error.
std::vector<MismatchRow> mismatch_sinr_sweep(const Topology& topo, const LargeScaleCsi& csi, const Limits& limits,
                                             const PowerAllocation& alloc, const ChirpParams& base,
                                             std::span<const MismatchError> errors);

void write_mismatch_csv(std::span<const MismatchRow> rows, const std::string& path);

} // namespace rmshare
