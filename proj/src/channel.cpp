// SPDX-License-Identifier: Apache-2.0
#include "rmshare/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmshare/errors.hpp"

namespace rmshare {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_position(std::uint64_t h, Position p) {
  // millimetre quantisation keeps the hash stable under harmless float noise
  auto q = [](double v) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(v * 1000.0))); };
  h = splitmix64(h ^ q(p.x));
  return splitmix64(h ^ q(p.y));
}

bool position_less(Position a, Position b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

/// Standard normal variate keyed by the unordered endpoint pair.
double pair_normal(std::uint64_t seed, Position a, Position b) {
  if (position_less(b, a)) std::swap(a, b);
  std::uint64_t h = hash_position(hash_position(splitmix64(seed), a), b);
  std::uint64_t h2 = splitmix64(h);
  double u1 = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double cross(Position o, Position a, Position b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Position p, Position q, Position r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y &&
         q.y <= std::max(p.y, r.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double linear_gain(const PathlossEstimator& est, const Transmitter& tx, Position rx) {
  return db_to_linear(-est.pathloss_db(tx, rx));
}

} // namespace

void validate_field(const PropagationField& field) {
  if (!(field.pathloss_exponent >= 1.5 && field.pathloss_exponent <= 6.0)) {
    throw ConfigError("field.pathloss_exponent: must lie in [1.5, 6]");
  }
  if (!(field.shadowing_sigma_db >= 0.0)) throw ConfigError("field.shadowing_sigma_db: must be >= 0");
  for (const auto& s : field.screens) {
    if (!(s.extra_loss_db >= 0.0)) throw ConfigError("field.screens: extra loss must be >= 0");
  }
}

bool segments_intersect(Position p1, Position p2, Position q1, Position q2) {
  int d1 = sign(cross(q1, q2, p1));
  int d2 = sign(cross(q1, q2, p2));
  int d3 = sign(cross(p1, p2, q1));
  int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, p1, q2)) return true;
  if (d2 == 0 && on_segment(q1, p2, q2)) return true;
  if (d3 == 0 && on_segment(p1, q1, p2)) return true;
  if (d4 == 0 && on_segment(p1, q2, p2)) return true;
  return false;
}

double ground_truth_pathloss(const PropagationField& field, Position tx, Position rx) {
  double d = distance(tx, rx);
  if (d <= 0.0) throw InvalidArgument("ground_truth_pathloss: transmitter and receiver coincide");
  double loss = field.reference_loss_db + 10.0 * field.pathloss_exponent * std::log10(std::max(d, 1.0));
  for (const auto& s : field.screens) {
    if (segments_intersect(tx, rx, s.a, s.b)) loss += s.extra_loss_db;
  }
  if (field.shadowing_sigma_db > 0.0) {
    loss += field.shadowing_sigma_db * pair_normal(field.shadowing_seed, tx, rx);
  }
  return loss;
}

double radar_antenna_gain(const AntennaPattern& pattern, double offset_deg) {
  double x = 2.0 * offset_deg / pattern.theta_3db_deg;
  return std::max(pattern.peak_gain_dbi - 3.0 * x * x, pattern.sidelobe_dbi);
}

double angle_between(Position origin, Position a, Position b) {
  double ax = a.x - origin.x, ay = a.y - origin.y;
  double bx = b.x - origin.x, by = b.y - origin.y;
  double c = std::atan2(ax * by - ay * bx, ax * bx + ay * by);
  return std::abs(c) * 180.0 / std::numbers::pi;
}

std::string bs_id(std::size_t index) { return "bs" + std::to_string(index); }
std::string radar_id(std::size_t index) { return "radar" + std::to_string(index); }

std::vector<Transmitter> transmitters(const Topology& topo) {
  std::vector<Transmitter> out;
  for (std::size_t j = 0; j < topo.num_bs(); ++j) out.push_back({bs_id(j), topo.bs_positions[j]});
  for (std::size_t i = 0; i < topo.num_radars(); ++i) out.push_back({radar_id(i), topo.radar_positions[i]});
  return out;
}

double GroundTruthEstimator::pathloss_db(const Transmitter& tx, Position rx) const {
  return ground_truth_pathloss(field_, tx.position, rx);
}

double bistatic_echo_gain(double d_tx_m, double d_rx_m, double gain_tx, double gain_rx, double carrier_ghz,
                          double rcs_m2) {
  double lambda = kSpeedOfLight / (carrier_ghz * 1e9);
  double four_pi = 4.0 * std::numbers::pi;
  return gain_tx * gain_rx * lambda * lambda * rcs_m2 /
         (four_pi * four_pi * four_pi * d_tx_m * d_tx_m * d_rx_m * d_rx_m);
}

LargeScaleCsi build_csi(const PathlossEstimator& estimator, const Topology& topo, const AntennaPattern& pattern,
                        const RadioParams& radio) {
  const std::size_t mc = topo.num_bs();
  const std::size_t mr = topo.num_radars();
  const Position target = topo.target_position;

  std::vector<double> to_target(mr);
  for (std::size_t i = 0; i < mr; ++i) {
    to_target[i] = distance(topo.radar_positions[i], target);
    if (to_target[i] <= 0.0) {
      throw InvalidArgument("build_csi: target coincides with " + radar_id(i));
    }
  }
  auto gain_toward = [&](std::size_t radar, Position other) {
    double offset = angle_between(topo.radar_positions[radar], target, other);
    return db_to_linear(radar_antenna_gain(pattern, offset));
  };

  LargeScaleCsi csi;
  csi.l_c.resize(mc);
  csi.l_c_to_r.resize(static_cast<Eigen::Index>(mc), static_cast<Eigen::Index>(mr));
  csi.l_r_to_c.resize(mr);
  csi.h_rr.resize(mr);
  csi.l_r_to_r.resize(static_cast<Eigen::Index>(mr), static_cast<Eigen::Index>(mr));

  for (std::size_t j = 0; j < mc; ++j) {
    Transmitter bs{bs_id(j), topo.bs_positions[j]};
    csi.l_c[j] = linear_gain(estimator, bs, topo.user_position);
    for (std::size_t i = 0; i < mr; ++i) {
      csi.l_c_to_r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          linear_gain(estimator, bs, topo.radar_positions[i]) * gain_toward(i, bs.position);
    }
  }
  const double peak = db_to_linear(pattern.peak_gain_dbi);
  for (std::size_t i = 0; i < mr; ++i) {
    Transmitter radar{radar_id(i), topo.radar_positions[i]};
    csi.l_r_to_c[i] = linear_gain(estimator, radar, topo.user_position) * gain_toward(i, topo.user_position);
    double echo = bistatic_echo_gain(to_target[i], to_target[i], peak, peak, radio.carrier_ghz, radio.target_rcs_m2);
    csi.h_rr[i] = std::sqrt(echo);
    for (std::size_t j = 0; j < mr; ++j) {
      csi.l_r_to_r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          bistatic_echo_gain(to_target[j], to_target[i], peak, peak, radio.carrier_ghz, radio.target_rcs_m2);
    }
  }
  return csi;
}

SmallScaleDraw sample_small_scale(std::mt19937_64& rng, int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw InvalidArgument("sample_small_scale: dimensions must be positive");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  SmallScaleDraw draw;
  draw.s_c.resize(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      double re = normal(rng);
      double im = normal(rng);
      draw.s_c(r, c) = {re, im};
    }
  }
  return draw;
}

} // namespace rmshare
