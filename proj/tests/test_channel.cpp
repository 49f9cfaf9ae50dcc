// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rmshare/channel.hpp"
#include "rmshare/config.hpp"
#include "rmshare/errors.hpp"
#include "test_support.hpp"

using namespace rmshare;

namespace {

PropagationField free_field(double exponent = 2.0) {
  PropagationField f;
  f.reference_loss_db = 40;
  f.pathloss_exponent = exponent;
  return f;
}

Topology small_topology() {
  Topology t;
  t.bs_positions = {{0, 0}, {300, 50}, {-200, 400}};
  t.radar_positions = {{1500, 1500}, {-1200, 900}};
  t.user_position = {100, 120};
  t.target_position = {800, 700};
  t.user_antennas = 3;
  return t;
}

} // namespace

TEST_CASE("free-space reference values") {
  const PropagationField f = free_field();
  CHECK(ground_truth_pathloss(f, {0, 0}, {10, 0}) == doctest::Approx(60.0).epsilon(1e-14));
  CHECK(ground_truth_pathloss(f, {0, 0}, {0.5, 0}) == doctest::Approx(40.0));
  CHECK_THROWS_AS(ground_truth_pathloss(f, {1, 1}, {1, 1}), InvalidArgument);
}

TEST_CASE("a crossed screen adds its loss") {
  PropagationField f = free_field();
  f.screens.push_back({{5, -5}, {5, 5}, 20});
  REQUIRE(segments_intersect({0, 0}, {10, 0}, {5, -5}, {5, 5}));
  CHECK(ground_truth_pathloss(f, {0, 0}, {10, 0}) == doctest::Approx(80.0));
  // parallel path that misses the screen
  CHECK_FALSE(segments_intersect({0, 10}, {10, 10}, {5, -5}, {5, 5}));
  CHECK(ground_truth_pathloss(f, {0, 10}, {10, 10}) == doctest::Approx(60.0));
}

TEST_CASE("segment intersection oracle") {
  CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  CHECK(segments_intersect({0, 0}, {2, 0}, {2, 0}, {3, 5})); // shared endpoint
  CHECK(segments_intersect({0, 0}, {4, 0}, {1, 0}, {2, 0})); // collinear overlap
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 1}, {0, 1}, {0.4, 0.6}));
}

TEST_CASE("path loss is reciprocal and repeatable, with or without shadowing") {
  PropagationField f = free_field(3.1);
  f.screens.push_back({{50, -100}, {60, 300}, 12});
  f.shadowing_sigma_db = 6;
  f.shadowing_seed = 99;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-500, 500);
  for (int k = 0; k < 200; ++k) {
    const Position a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double ab = ground_truth_pathloss(f, a, b);
    CHECK(ab == ground_truth_pathloss(f, b, a));
    CHECK(ab == ground_truth_pathloss(f, a, b));
  }
  PropagationField g = f;
  g.shadowing_seed = 100;
  CHECK(ground_truth_pathloss(f, {0, 0}, {70, 80}) != ground_truth_pathloss(g, {0, 0}, {70, 80}));
}

TEST_CASE("antenna pattern") {
  const AntennaPattern p;
  CHECK(radar_antenna_gain(p, 0) == 30.0);
  CHECK(radar_antenna_gain(p, 16) == doctest::Approx(27.0).epsilon(1e-14));
  CHECK(radar_antenna_gain(p, 90) == -10.0);
  // the Gaussian lobe alone would sit far below the floor at 90 degrees
  CHECK(30.0 - 3.0 * std::pow(2.0 * 90 / 32, 2) < -10.0);
  double prev = radar_antenna_gain(p, 0);
  for (double a = 0.1; a <= 180.0; a += 0.1) {
    const double g = radar_antenna_gain(p, a);
    CHECK(g <= prev);
    prev = g;
  }
}

TEST_CASE("angle_between") {
  CHECK(angle_between({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(90));
  CHECK(angle_between({0, 0}, {1, 0}, {-1, 0}) == doctest::Approx(180));
  CHECK(angle_between({0, 0}, {1, 1}, {2, 2}) == doctest::Approx(0));
}

TEST_CASE("small-scale draws: moments and determinism") {
  std::mt19937_64 rng(5);
  const SmallScaleDraw d = sample_small_scale(rng, 100000, 1);
  const double m2 = d.s_c.cwiseAbs2().mean();
  CHECK(std::abs(m2 - 1.0) < 0.02);
  CHECK(std::abs(d.s_c.mean()) < 0.01);

  std::mt19937_64 a(42), b(42), c(43);
  const auto da = sample_small_scale(a, 3, 4), db = sample_small_scale(b, 3, 4), dc = sample_small_scale(c, 3, 4);
  CHECK(da.s_c == db.s_c);
  CHECK(da.s_c != dc.s_c);
  CHECK_THROWS_AS(sample_small_scale(a, 0, 4), InvalidArgument);
}

TEST_CASE("user 10x farther scales l_c by 1e-2 under exponent 2") {
  const PropagationField f = free_field();
  Topology t = small_topology();
  t.bs_positions = {{0, 0}, {10, 0}, {0, 20}};
  t.user_position = {5, 5};
  const LargeScaleCsi near = build_csi(f, t, AntennaPattern{});
  // scale every BS-user separation by 10 around the user
  for (auto& b : t.bs_positions) b = {t.user_position.x + 10 * (b.x - t.user_position.x),
                                      t.user_position.y + 10 * (b.y - t.user_position.y)};
  const LargeScaleCsi far = build_csi(f, t, AntennaPattern{});
  for (std::size_t j = 0; j < 3; ++j) CHECK(far.l_c[j] / near.l_c[j] == doctest::Approx(1e-2).epsilon(1e-12));
}

TEST_CASE("echo uses the peak gain at both ends") {
  const Topology t = small_topology();
  const AntennaPattern p;
  const RadioParams radio{2.8, 1.0};
  const LargeScaleCsi csi = build_csi(free_field(), t, p, radio);
  const double c0 = 299792458.0;
  const double lambda = c0 / 2.8e9;
  for (std::size_t i = 0; i < 2; ++i) {
    const double d = distance(t.radar_positions[i], t.target_position);
    const double expected = 1e3 * 1e3 * lambda * lambda / (std::pow(4 * std::numbers::pi, 3) * std::pow(d, 4));
    CHECK(csi.echo_gain(i) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(csi.l_r_to_r(i, i) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("interference links combine path loss and off-boresight gain") {
  const Topology t = small_topology();
  const PropagationField f = free_field(3.0);
  const AntennaPattern p;
  const LargeScaleCsi csi = build_csi(f, t, p);
  for (std::size_t i = 0; i < 2; ++i) {
    const double off = angle_between(t.radar_positions[i], t.target_position, t.user_position);
    const double expected = db_to_linear(-ground_truth_pathloss(f, t.radar_positions[i], t.user_position) +
                                         radar_antenna_gain(p, off));
    CHECK(csi.l_r_to_c[i] == doctest::Approx(expected).epsilon(1e-12));
    for (std::size_t j = 0; j < 3; ++j) {
      const double offj = angle_between(t.radar_positions[i], t.target_position, t.bs_positions[j]);
      const double ej = db_to_linear(-ground_truth_pathloss(f, t.bs_positions[j], t.radar_positions[i]) +
                                     radar_antenna_gain(p, offj));
      CHECK(csi.l_c_to_r(j, i) == doctest::Approx(ej).epsilon(1e-12));
    }
  }
}

TEST_CASE("reference topology yields positive finite gains") {
  const ScenarioConfig c = load_config(testing::config_path("reference_scenario.toml"));
  const LargeScaleCsi csi = build_csi(c.field, c.topology, c.antenna, c.radio);
  int count = 0;
  auto ok = [&](double g) {
    ++count;
    return std::isfinite(g) && g > 0.0;
  };
  for (double g : csi.l_c) CHECK(ok(g));
  for (Eigen::Index k = 0; k < csi.l_c_to_r.size(); ++k) CHECK(ok(csi.l_c_to_r.data()[k]));
  for (double g : csi.l_r_to_c) CHECK(ok(g));
  for (std::size_t i = 0; i < csi.num_radars(); ++i) CHECK(ok(csi.echo_gain(i)));
  CHECK(count == 3 * 2 + 3 + 2 + 2);
}

TEST_CASE("relabeling base stations permutes the gains") {
  PropagationField f = free_field(3.3);
  f.screens.push_back({{50, -50}, {50, 500}, 15});
  Topology t = small_topology();
  const LargeScaleCsi a = build_csi(f, t, AntennaPattern{});
  std::swap(t.bs_positions[0], t.bs_positions[2]);
  const LargeScaleCsi b = build_csi(f, t, AntennaPattern{});
  CHECK(a.l_c[0] == b.l_c[2]);
  CHECK(a.l_c[2] == b.l_c[0]);
  CHECK(a.l_c[1] == b.l_c[1]);
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK(a.l_c_to_r(0, i) == b.l_c_to_r(2, i));
    CHECK(a.l_c_to_r(2, i) == b.l_c_to_r(0, i));
  }
  CHECK(a.l_r_to_c == b.l_r_to_c);
}

TEST_CASE("field validation") {
  PropagationField f = free_field();
  CHECK_NOTHROW(validate_field(f));
  f.pathloss_exponent = 0.5;
  CHECK_THROWS_AS(validate_field(f), ConfigError);
}
