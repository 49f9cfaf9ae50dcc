// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmshare/scenario.hpp"

namespace rmshare {

/// A straight obstruction (wall, building face) adding a fixed loss to every link crossing it.
struct Screen {
  Position a;
  Position b;
  double extra_loss_db = 0.0;
};

/// Deterministic synthetic propagation environment standing in for a ray tracer.
struct PropagationField {
  double reference_loss_db = 40.0; // at 1 m
  double pathloss_exponent = 2.0;
  std::vector<Screen> screens;
  double shadowing_sigma_db = 0.0;
  std::uint64_t shadowing_seed = 0;
};

void validate_field(const PropagationField& field);

/// True when segment p1-p2 properly intersects segment q1-q2 (touching endpoints count).
bool segments_intersect(Position p1, Position p2, Position q1, Position q2);

/// Path loss in dB between two points. Symmetric in (tx, rx) and repeatable for a fixed field.
/// Distances below 1 m are clamped to the 1 m reference.
double ground_truth_pathloss(const PropagationField& field, Position tx, Position rx);

/// Parametric radar antenna: Gaussian main lobe, constant sidelobe floor.
struct AntennaPattern {
  double peak_gain_dbi = 30.0;
  double theta_3db_deg = 32.0;
  double sidelobe_dbi = -10.0;
};

/// Gain at `offset_deg` off boresight, offset in [0, 180].
double radar_antenna_gain(const AntennaPattern& pattern, double offset_deg);

/// Angle in degrees between the rays from `origin` to `a` and from `origin` to `b`.
double angle_between(Position origin, Position a, Position b);

struct RadioParams {
  double carrier_ghz = 2.8;
  double target_rcs_m2 = 1.0;
};

/// Large-scale CSI as linear power gains.
struct LargeScaleCsi {
  std::vector<double> l_c;               // BS j -> user
  Eigen::MatrixXd l_c_to_r;              // (BS j, radar i)
  std::vector<double> l_r_to_c;          // radar i -> user
  std::vector<std::complex<double>> h_rr; // radar i two-way echo amplitude
  Eigen::MatrixXd l_r_to_r;              // (radar j, radar i): echo of radar j received by radar i

  std::size_t num_bs() const { return l_c.size(); }
  std::size_t num_radars() const { return l_r_to_c.size(); }
  double echo_gain(std::size_t radar) const { return std::norm(h_rr[radar]); }
};

/// A transmitter as seen by a path-loss estimator.
struct Transmitter {
  std::string id; // "bs0", "radar1", ...
  Position position;
};

std::string bs_id(std::size_t index);
std::string radar_id(std::size_t index);
std::vector<Transmitter> transmitters(const Topology& topo);

/// Anything that answers "path loss from this transmitter to that position".
class PathlossEstimator {
public:
  virtual ~PathlossEstimator() = default;
  virtual double pathloss_db(const Transmitter& tx, Position rx) const = 0;
};

class GroundTruthEstimator final : public PathlossEstimator {
public:
  explicit GroundTruthEstimator(PropagationField field) : field_(std::move(field)) {}
  double pathloss_db(const Transmitter& tx, Position rx) const override;
  const PropagationField& field() const { return field_; }

private:
  PropagationField field_;
};

/// Free-space radar-equation gain G_tx G_rx lambda^2 sigma / ((4 pi)^3 d_tx^2 d_rx^2).
double bistatic_echo_gain(double d_tx_m, double d_rx_m, double gain_tx, double gain_rx,
                          double carrier_ghz, double rcs_m2);

/// Assembles all large-scale gains. Radars aim their boresight at the target; interference links
/// pick up the radar gain toward the other endpoint, echo links use the peak gain at both ends.
LargeScaleCsi build_csi(const PathlossEstimator& estimator, const Topology& topo,
                        const AntennaPattern& pattern, const RadioParams& radio);

inline LargeScaleCsi build_csi(const PropagationField& field, const Topology& topo,
                               const AntennaPattern& pattern, const RadioParams& radio = {}) {
  return build_csi(GroundTruthEstimator(field), topo, pattern, radio);
}

using ComplexMatrix = Eigen::MatrixXcd;

/// Draw of i.i.d. CN(0, 1) entries (variance 1/2 per real component).
struct SmallScaleDraw {
  ComplexMatrix s_c;
};

SmallScaleDraw sample_small_scale(std::mt19937_64& rng, int rows, int cols);

} // namespace rmshare
