// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "rmshare/errors.hpp"
#include "rmshare/metrics.hpp"
#include "rmshare/waveform.hpp"
#include "test_support.hpp"

using namespace rmshare;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent closed form of the LFM self-ambiguity; sign +1 for up-chirps.
double lfm_reference(double tau, double b, double sign, double dt, double fd) {
  if (std::abs(dt) >= tau) return 0.0;
  const double x = (sign * b * dt / tau + fd) * (tau - std::abs(dt));
  const double s = std::abs(x) < 1e-12 ? 1.0 : std::sin(kPi * x) / (kPi * x);
  return (1.0 - std::abs(dt) / tau) * std::abs(s);
}

struct Scene {
  Topology topo;
  LargeScaleCsi csi;
  Limits limits;
  PowerAllocation alloc;
};

Scene two_radar_scene() {
  Scene s;
  s.topo.bs_positions = {{0, 0}};
  s.topo.radar_positions = {{-1000, 0}, {0, 1500}};
  s.topo.user_position = {100, 100};
  s.topo.target_position = {300, 200};
  s.topo.user_antennas = 1;
  PropagationField f;
  f.pathloss_exponent = 3.0;
  s.csi = build_csi(f, s.topo, AntennaPattern{});
  s.limits.p_cmax = s.limits.p_csum = 40;
  s.limits.p_rmax = 1000;
  s.limits.p_rsum = 1500;
  s.limits.noise_power = dbm_to_watts(-107);
  s.limits.pulses_per_cpi = 256;
  s.limits.false_alarm_prob = 1e-4;
  s.alloc = {{5.0}, {700.0, 800.0}};
  return s;
}

} // namespace

TEST_CASE("chirp envelope") {
  const ChirpParams up;
  CHECK(up.bandwidth * up.pulse_duration == doctest::Approx(10.0));
  const double tau = up.pulse_duration;
  for (double t = 0.0; t <= tau; t += tau / 37) CHECK(std::abs(chirp_envelope(up, t)) == doctest::Approx(1.0 / std::sqrt(tau)));
  CHECK(chirp_envelope(up, -1e-9) == std::complex<double>(0.0, 0.0));
  CHECK(chirp_envelope(up, tau * 1.01) == std::complex<double>(0.0, 0.0));
  ChirpParams down = up;
  down.direction = ChirpDirection::Down;
  for (double t = 0.0; t <= tau; t += tau / 13) CHECK(std::abs(chirp_envelope(down, t) - std::conj(chirp_envelope(up, t))) < 1e-9);
  // unit energy by a fine midpoint rule
  double e = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) e += std::norm(chirp_envelope(up, (k + 0.5) * tau / n)) * tau / n;
  CHECK(std::abs(e - 1.0) < 1e-9);
  CHECK_THROWS_AS(validate_chirp({0.0, 1e6, ChirpDirection::Up}), InvalidArgument);
}

TEST_CASE("numeric ambiguity: origin, support and bound") {
  const ChirpParams up;
  const double tau = up.pulse_duration;
  CHECK(std::abs(ambiguity_numeric(up, up, 0, 0) - 1.0) < 1e-9);
  CHECK(ambiguity_numeric(up, up, tau, 0) == 0.0);
  CHECK(ambiguity_numeric(up, up, -1.5 * tau, 1e5) == 0.0);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> dt(-1.2 * tau, 1.2 * tau), fd(-2e6, 2e6);
  ChirpParams down = up;
  down.direction = ChirpDirection::Down;
  for (int k = 0; k < 300; ++k) {
    const double a = dt(rng), f = fd(rng);
    CHECK(ambiguity_numeric(up, up, a, f) <= 1.0 + 1e-12);
    CHECK(ambiguity_numeric(up, down, a, f) <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(ambiguity_numeric(up, up, 0, 0, 100), InvalidArgument);
}

TEST_CASE("auto-ambiguity is even in delay at zero Doppler") {
  const ChirpParams up;
  for (double f = 0.05; f < 1.0; f += 0.05) {
    const double dt = f * up.pulse_duration;
    CHECK(ambiguity_numeric(up, up, dt, 0) == doctest::Approx(ambiguity_numeric(up, up, -dt, 0)).epsilon(1e-9));
  }
}

TEST_CASE("quadrature convergence") {
  const ChirpParams up;
  const double a = ambiguity_numeric(up, up, 0.2 * up.pulse_duration, 0.0, 4096);
  const double b = ambiguity_numeric(up, up, 0.2 * up.pulse_duration, 0.0, 8192);
  CHECK(std::abs(a - b) < 1e-6);
  CHECK(a == doctest::Approx(lfm_reference(2e-6, 5e6, 1.0, 0.4e-6, 0.0)).epsilon(1e-6));
  for (double f : {0.0, 1e5, 7e5}) {
    CHECK(std::abs(ambiguity_numeric(up, up, 0.37e-6, f, 4096) - ambiguity_numeric(up, up, 0.37e-6, f, 8192)) < 1e-6);
  }
}

TEST_CASE("standard LFM form against quadrature on a 21x21 grid") {
  for (ChirpDirection dir : {ChirpDirection::Up, ChirpDirection::Down}) {
    const ChirpParams p{2e-6, 5e6, dir};
    const double sign = dir == ChirpDirection::Up ? 1.0 : -1.0;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double dt = 0.095 * i * p.pulse_duration;
        const double fd = 1.5e5 * j;
        const double q = ambiguity_numeric(p, p, dt, fd);
        CHECK(std::abs(ambiguity_lfm(p, dt, fd) - q) < 1e-4);
        CHECK(std::abs(lfm_reference(2e-6, 5e6, sign, dt, fd) - q) < 1e-4);
      }
    }
  }
}

TEST_CASE("piecewise closed forms") {
  const ChirpParams up;
  const double tau = up.pulse_duration;
  // the g = B/tau + dfd auto variant does not reach 1 at the origin
  const double variant = ambiguity_chirp_closed(AmbiguityKind::Auto, up, 0.0, 0.0);
  const double b_over_tau = up.bandwidth / tau;
  CHECK(variant == doctest::Approx(std::abs(std::sin(kPi * b_over_tau * tau) / (kPi * b_over_tau * tau))).epsilon(1e-12));
  CHECK(std::abs(variant - 1.0) > 0.5);
  // the cross form collapses at -tau and tracks the up/down quadrature
  CHECK(ambiguity_chirp_closed(AmbiguityKind::Cross, up, -tau, 0.0) == 0.0);
  ChirpParams down = up;
  down.direction = ChirpDirection::Down;
  for (double f : {-0.6, -0.2, 0.0, 0.3, 0.8}) {
    for (double fd : {0.0, 2e5}) {
      CHECK(ambiguity_chirp_closed(AmbiguityKind::Cross, up, f * tau, fd) ==
            doctest::Approx(ambiguity_numeric(up, down, f * tau, fd)).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(ambiguity_chirp_closed(AmbiguityKind::Auto, up, 1.5 * tau, 0.0), InvalidArgument);
}

TEST_CASE("radar waveforms alternate chirp direction") {
  const ChirpParams base;
  CHECK(radar_waveform(base, 0).direction == ChirpDirection::Up);
  CHECK(radar_waveform(base, 1).direction == ChirpDirection::Down);
  CHECK(radar_waveform(base, 2).direction == ChirpDirection::Up);
}

TEST_CASE("mismatch sweep") {
  const Scene s = two_radar_scene();
  const ChirpParams base;
  const std::vector<MismatchError> errs{{0.0, 0.0}, {0.0, 2000.0}, {0.005 * base.pulse_duration, 0.0}};
  const auto rows = mismatch_sinr_sweep(s.topo, s.csi, s.limits, s.alloc, base, errs);
  REQUIRE(rows.size() == 6);

  const double c0 = 299792458.0;
  const double r0 = distance(s.topo.radar_positions[0], s.topo.target_position);
  const double r1 = distance(s.topo.radar_positions[1], s.topo.target_position);
  for (std::size_t i = 0; i < 2; ++i) {
    // zero error: unit auto term, cross term at its geometric offset
    const std::size_t j = 1 - i;
    const double offset = ((i == 0 ? r0 : r1) - (i == 0 ? r1 : r0)) / c0;
    std::vector<double> cross(2, 0.0);
    cross[j] = ambiguity_numeric(radar_waveform(base, j), radar_waveform(base, i), offset, 0.0);
    const double expected = radar_sinr_with_ambiguity(s.alloc, s.csi, i, s.limits.noise_power,
                                                      ambiguity_numeric(radar_waveform(base, i), radar_waveform(base, i), 0, 0), cross);
    CHECK(rows[i].sinr == doctest::Approx(expected).epsilon(1e-12));
    // far-apart ranges leave no overlap, so the ideal SINR comes back
    if (std::abs(offset) >= base.pulse_duration) {
      CHECK(rows[i].sinr == doctest::Approx(radar_sinr(s.alloc, s.csi, i, s.limits.noise_power)).epsilon(1e-8));
    }
    const double doppler = std::abs(rows[2 + i].sinr - rows[i].sinr) / rows[i].sinr;
    CHECK(doppler < 0.01);
    const double pd_doppler = rows[i].pd - rows[2 + i].pd;
    const double pd_delay = rows[i].pd - rows[4 + i].pd;
    CHECK(pd_delay > 0.0);
    CHECK(pd_delay >= 3.0 * std::abs(pd_doppler));
  }

  testing::TempDir dir("mismatch");
  write_mismatch_csv(rows, (dir.path() / "m.csv").string());
  std::ifstream in(dir.path() / "m.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "delta_tau_s,delta_fd_hz,radar_id,sinr,pd");

  PowerAllocation over = s.alloc;
  over.p_r[0] = 5000;
  CHECK_THROWS_AS(mismatch_sinr_sweep(s.topo, s.csi, s.limits, over, base, errs), InvalidArgument);
}
