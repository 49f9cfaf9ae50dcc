// SPDX-License-Identifier: Apache-2.0
#include "rmshare/waveform.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "rmshare/errors.hpp"
#include "rmshare/metrics.hpp"

namespace rmshare {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight = 299'792'458.0;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
  return std::sin(kPi * x) / (kPi * x);
}

template <class F>
std::complex<double> simpson(F&& f, double lo, double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / intervals;
  std::complex<double> acc = f(lo) + f(hi);
  for (int k = 1; k < intervals; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f(lo + k * h);
  return acc * (h / 3.0);
}

// Phase of the envelope on its support, without the 1/sqrt(tau) factor.
std::complex<double> chirp_phase(const ChirpParams& p, double t) {
  const double s = p.direction == ChirpDirection::Up ? 1.0 : -1.0;
  const double tau = p.pulse_duration, b = p.bandwidth;
  return std::polar(1.0, s * (kPi * b * t * t / tau - kPi * b * t));
}

} // namespace

void validate_chirp(const ChirpParams& p) {
  if (!(p.pulse_duration > 0.0)) throw InvalidArgument("chirp: pulse_duration must be positive");
  if (!(p.bandwidth > 0.0)) throw InvalidArgument("chirp: bandwidth must be positive");
}

std::complex<double> chirp_envelope(const ChirpParams& p, double t) {
  if (t < 0.0 || t > p.pulse_duration) return {0.0, 0.0};
  return chirp_phase(p, t) / std::sqrt(p.pulse_duration);
}

double ambiguity_numeric(const ChirpParams& a, const ChirpParams& b, double delta_tau, double delta_fd,
                         int quadrature_points) {
  validate_chirp(a);
  validate_chirp(b);
  if (quadrature_points < kMinQuadraturePoints) {
    throw InvalidArgument("ambiguity_numeric: at least " + std::to_string(kMinQuadraturePoints) + " points required");
  }
  // u_a lives on [0, tau_a], u_b(v - dtau) on [dtau, dtau + tau_b].
  const double lo = std::max(0.0, delta_tau);
  const double hi = std::min(a.pulse_duration, delta_tau + b.pulse_duration);
  if (!(hi > lo)) return 0.0;
  const double norm = 1.0 / std::sqrt(a.pulse_duration * b.pulse_duration);
  auto f = [&](double v) {
    return chirp_phase(a, v) * std::conj(chirp_phase(b, v - delta_tau)) * std::polar(1.0, 2.0 * kPi * delta_fd * v);
  };
  return std::abs(simpson(f, lo, hi, quadrature_points)) * norm;
}

double ambiguity_chirp_closed(AmbiguityKind kind, const ChirpParams& p, double delta_tau, double delta_fd) {
  validate_chirp(p);
  const double tau = p.pulse_duration, b = p.bandwidth;
  if (std::abs(delta_tau) > tau) throw InvalidArgument("ambiguity_chirp_closed: |delta_tau| must not exceed tau");
  if (kind == AmbiguityKind::Auto) {
    const double g = b / tau + delta_fd;
    const double span = tau - std::abs(delta_tau);
    return std::abs(std::sin(kPi * g * span) / (kPi * g * tau));
  }
  const double lo = delta_tau < 0.0 ? 0.0 : delta_tau;
  const double hi = delta_tau < 0.0 ? tau + delta_tau : tau;
  if (!(hi > lo)) return 0.0;
  auto f = [&](double u) {
    return std::polar(1.0, 2.0 * kPi * (delta_fd + (u - delta_tau - tau) / tau * b) * u);
  };
  return std::abs(simpson(f, lo, hi, kDefaultQuadraturePoints)) / tau;
}

double ambiguity_lfm(const ChirpParams& p, double delta_tau, double delta_fd) {
  validate_chirp(p);
  const double tau = p.pulse_duration;
  const double overlap = tau - std::abs(delta_tau);
  if (overlap <= 0.0) return 0.0;
  const double s = p.direction == ChirpDirection::Up ? 1.0 : -1.0;
  return overlap / tau * std::abs(sinc((s * p.bandwidth * delta_tau / tau + delta_fd) * overlap));
}

ChirpParams radar_waveform(const ChirpParams& base, std::size_t index) {
  ChirpParams p = base;
  p.direction = index % 2 == 0 ? ChirpDirection::Up : ChirpDirection::Down;
  return p;
}

std::vector<MismatchRow> mismatch_sinr_sweep(const Topology& topo, const LargeScaleCsi& csi, const Limits& limits,
                                             const PowerAllocation& alloc, const ChirpParams& base,
                                             std::span<const MismatchError> errors) {
  validate_chirp(base);
  const std::size_t mr = csi.num_radars();
  if (topo.num_radars() != mr) throw InvalidArgument("mismatch_sinr_sweep: topology and CSI disagree");
  if (validate_allocation(alloc, limits, csi.num_bs(), mr).size() > 0) {
    throw InvalidArgument("mismatch_sinr_sweep: allocation violates the power limits");
  }
  const double mu = detection_threshold(limits.false_alarm_prob, limits.pulses_per_cpi);
  std::vector<double> range(mr);
  for (std::size_t i = 0; i < mr; ++i) range[i] = distance(topo.radar_positions[i], topo.target_position);

  std::vector<MismatchRow> rows;
  rows.reserve(errors.size() * mr);
  for (const MismatchError& e : errors) {
    for (std::size_t i = 0; i < mr; ++i) {
      const ChirpParams own = radar_waveform(base, i);
      const double chi_auto = ambiguity_numeric(own, own, e.delay_error, e.doppler_error);
      std::vector<double> chi_cross(mr, 0.0);
      for (std::size_t j = 0; j < mr; ++j) {
        if (j == i) continue;
        const double offset = (range[i] - range[j]) / kSpeedOfLight + e.delay_error;
        chi_cross[j] = ambiguity_numeric(radar_waveform(base, j), own, offset, e.doppler_error);
      }
      const double sinr = radar_sinr_with_ambiguity(alloc, csi, i, limits.noise_power, chi_auto, chi_cross);
      rows.push_back({e.delay_error, e.doppler_error, i, sinr, detection_probability(sinr, mu, limits.pulses_per_cpi)});
    }
  }
  return rows;
}

void write_mismatch_csv(std::span<const MismatchRow> rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os.precision(12);
  os << "delta_tau_s,delta_fd_hz,radar_id,sinr,pd\n";
  for (const MismatchRow& r : rows) {
    os << r.delta_tau_s << ',' << r.delta_fd_hz << ',' << radar_id(r.radar) << ',' << r.sinr << ',' << r.pd << '\n';
  }
}

} // namespace rmshare
