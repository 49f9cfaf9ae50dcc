// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rmshare/errors.hpp"
#include "rmshare/metrics.hpp"
#include "test_support.hpp"

using namespace rmshare;
namespace oracle = rmshare::testing::oracle;
using rmshare::testing::rel_err;

namespace {

LargeScaleCsi single_link(double l_c, double l_c_to_r, double echo, double l_r_to_c = 0.0) {
  LargeScaleCsi c;
  c.l_c = {l_c};
  c.l_c_to_r = Eigen::MatrixXd::Constant(1, 1, l_c_to_r);
  c.l_r_to_c = {l_r_to_c};
  c.h_rr = {std::sqrt(echo)};
  c.l_r_to_r = Eigen::MatrixXd::Constant(1, 1, echo);
  return c;
}

// Reference deterministic equivalent written out from its definition, with v* from the
// single-antenna quadratic when it applies and plain bisection otherwise.
double reference_v(const std::vector<double>& a, int nc) {
  double lo = 1.0, hi = 2.0;
  auto f = [&](double v) {
    double s = 0;
    for (double x : a) s += x / (v + nc * x);
    return 1.0 - 1.0 / v - s;
  };
  while (f(hi) < 0) hi *= 2;
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

double reference_rap(const std::vector<double>& a, int nc) {
  const double v = reference_v(a, nc);
  double r = 0;
  for (double x : a) r += std::log2(1.0 + nc * x / v);
  return r + nc * std::log2(v) - nc * std::numbers::log2e * (1.0 - 1.0 / v);
}

} // namespace

TEST_CASE("radar interference") {
  LargeScaleCsi c = single_link(1.0, 1e-10, 1e-12);
  const std::vector<double> zero{0.0}, ten{10.0}, twenty{20.0};
  CHECK(radar_interference(zero, c, 0, 1e-14) == 1e-14);
  CHECK(radar_interference(ten, c, 0, 1e-14) == doctest::Approx(1.00001e-9).epsilon(1e-14));
  CHECK(radar_interference(twenty, c, 0, 1e-14) - 1e-14 ==
        doctest::Approx(2.0 * (radar_interference(ten, c, 0, 1e-14) - 1e-14)).epsilon(1e-14));
}

TEST_CASE("radar SINR") {
  const LargeScaleCsi c = single_link(1.0, 1e-10, 1e-12);
  CHECK(radar_sinr({{0.0}, {100.0}}, c, 0, 1e-14) == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(radar_sinr({{5.0}, {0.0}}, c, 0, 1e-14) == 0.0);
  // interference-limited: scaling both sides leaves SINR nearly unchanged
  const double r1 = radar_sinr({{1.0}, {100.0}}, c, 0, 1e-20);
  const double r10 = radar_sinr({{10.0}, {1000.0}}, c, 0, 1e-20);
  CHECK(rel_err(r10, r1) < 1e-6);
  CHECK_THROWS_AS(radar_sinr({{0.0}, {1.0}}, c, 3, 1e-14), InvalidArgument);
}

TEST_CASE("SINR with ambiguity weights") {
  LargeScaleCsi c;
  c.l_c = {1e-10};
  c.l_c_to_r = Eigen::MatrixXd::Constant(1, 2, 1e-13);
  c.l_r_to_c = {1e-16, 1e-16};
  c.h_rr = {std::sqrt(2e-15), std::sqrt(3e-15)};
  c.l_r_to_r = Eigen::MatrixXd(2, 2);
  c.l_r_to_r << 2e-15, 4e-16, 4e-16, 3e-15;
  const PowerAllocation a{{10.0}, {200.0, 300.0}};
  const double n = 1e-14;
  const std::vector<double> ideal{1.0, 0.0};
  CHECK(radar_sinr_with_ambiguity(a, c, 0, n, 1.0, ideal) == radar_sinr(a, c, 0, n));
  CHECK(radar_sinr_with_ambiguity(a, c, 0, n, 0.0, ideal) == 0.0);
  const std::vector<double> cross{0.0, 0.1};
  const double expected = 200.0 * 2e-15 * 0.81 / (10.0 * 1e-13 + n + 300.0 * 4e-16 * 0.01);
  CHECK(radar_sinr_with_ambiguity(a, c, 0, n, 0.9, cross) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("detection threshold") {
  CHECK(detection_threshold(0.5, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(detection_threshold(1e-4, 256) == doctest::Approx(oracle::kMuN256Pfa1e4).epsilon(1e-13));
  // the rounded value quoted alongside the formula
  CHECK(std::abs(detection_threshold(1e-4, 256) - 0.035477) < 5e-6);
  for (int n : {2, 16, 256, 1024}) {
    for (double p : {1e-8, 1e-4, 1e-2, 0.3}) {
      CHECK(std::abs(false_alarm_probability(detection_threshold(p, n), n) - p) <= 1e-12 * std::max(p, 1e-3));
    }
  }
  double prev = 1.0;
  for (double p = 1e-9; p < 0.9; p *= 3) {
    const double mu = detection_threshold(p, 256);
    CHECK(mu < prev);
    prev = mu;
  }
  CHECK_THROWS_AS(detection_threshold(0.0, 256), InvalidArgument);
  CHECK_THROWS_AS(detection_threshold(0.1, 1), InvalidArgument);
}

TEST_CASE("detection probability") {
  const double mu = oracle::kMuN256Pfa1e4;
  CHECK(detection_probability(0.05, mu, 256) == doctest::Approx(oracle::kPdRho005).epsilon(1e-12));
  for (int n : {2, 10, 256}) {
    for (double m : {0.01, 0.2, 0.7}) CHECK(detection_probability(0.0, m, n) == false_alarm_probability(m, n));
  }
  CHECK(detection_probability(1e12, mu, 256) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = 0.0;
  for (double rho = 0.0; rho < 10.0; rho += 0.01) {
    const double pd = detection_probability(rho, mu, 256);
    CHECK(pd > prev);
    prev = pd;
  }
}

TEST_CASE("communication interference") {
  const std::vector<double> l{1e-11, 2e-11};
  CHECK(comm_interference(std::vector<double>{0, 0}, l, 1e-14) == 1e-14);
  CHECK(comm_interference(std::vector<double>{100, 50}, l, 1e-14) == doctest::Approx(1e-14 + 2e-9).epsilon(1e-14));
  CHECK(comm_interference(std::vector<double>{1000, 1000}, l, 1e-14) > comm_interference(std::vector<double>{0, 0}, l, 1e-14));
}

TEST_CASE("Monte Carlo ergodic rate") {
  const std::vector<double> l{1.0};
  SUBCASE("zero power gives zero") {
    const RateEstimate r = ergodic_rate_mc(std::vector<double>{0.0}, l, 1.0, 1, 1000, 3);
    CHECK(r.mean == 0.0);
    CHECK(r.std_error == 0.0);
  }
  SUBCASE("Rayleigh closed form at mean SNR 2") {
    const RateEstimate r = ergodic_rate_mc(std::vector<double>{2.0}, l, 1.0, 1, 1'000'000, 17, 4);
    CHECK(std::abs(r.mean - oracle::kRayleighRateSnr2) < 0.01);
    CHECK(r.std_error < 0.002);
  }
  SUBCASE("independent of worker count") {
    const auto a = ergodic_rate_mc(std::vector<double>{2.0, 3.0}, std::vector<double>{1.0, 0.5}, 1.0, 2, 20000, 9, 1);
    const auto b = ergodic_rate_mc(std::vector<double>{2.0, 3.0}, std::vector<double>{1.0, 0.5}, 1.0, 2, 20000, 9, 7);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }
  SUBCASE("more interference lowers the rate under common random numbers") {
    const auto a = ergodic_rate_mc(std::vector<double>{2.0}, l, 1.0, 2, 5000, 4);
    const auto b = ergodic_rate_mc(std::vector<double>{2.0}, l, 2.0, 2, 5000, 4);
    CHECK(b.mean < a.mean);
  }
}

TEST_CASE("fixed point") {
  CHECK(solve_fixed_point(std::vector<double>{0.0}, 1).v_star == 1.0);
  CHECK(solve_fixed_point(std::vector<double>{2.0}, 1).v_star == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(solve_fixed_point(std::vector<double>{6.0}, 1).v_star == doctest::Approx(3.0).epsilon(1e-12));

  std::mt19937_64 rng(21);
  for (int k = 0; k < 300; ++k) {
    const int nc = 1 + static_cast<int>(rng() % 4);
    const std::size_t m = 1 + rng() % static_cast<std::size_t>(nc);
    std::vector<double> a(m);
    for (double& x : a) x = testing::log_uniform(rng, 1e-3, 1e5);
    const FixedPoint fp = solve_fixed_point(a, nc);
    CHECK(fp.v_star >= 1.0);
    CHECK(std::abs(fp.residual) <= 1e-12);
    CHECK(rel_err(fp.v_star, reference_v(a, nc)) < 1e-10);
    // bracket [1, 1 + N_c sum a] has a sign change
    double s = 0;
    for (double x : a) s += x;
    CHECK(fixed_point_residual(a, nc, 1.0) <= 0.0);
    CHECK(fixed_point_residual(a, nc, 1.0 + nc * s) >= 0.0);
    // strictly increasing residual
    CHECK(fixed_point_residual(a, nc, fp.v_star * 1.01) > fixed_point_residual(a, nc, fp.v_star));
  }
}

TEST_CASE("deterministic equivalent") {
  CHECK(ergodic_rate_approx(std::vector<double>{0.0, 0.0}, 2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ergodic_rate_approx(std::vector<double>{2.0}, 1) == doctest::Approx(oracle::kRapSnr2).epsilon(1e-12));
  // roughly 4% under the simulated ergodic rate at a = 2
  const double dev = (oracle::kRayleighRateSnr2 - oracle::kRapSnr2) / oracle::kRayleighRateSnr2;
  CHECK(dev == doctest::Approx(0.0397).epsilon(0.01));

  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const int nc = 1 + static_cast<int>(rng() % 3);
    std::vector<double> a(static_cast<std::size_t>(nc));
    for (double& x : a) x = testing::log_uniform(rng, 1e-2, 1e3);
    CHECK(rel_err(ergodic_rate_approx(a, nc), reference_rap(a, nc)) < 1e-10);
  }
}

TEST_CASE("ratio invariance") {
  LargeScaleCsi c;
  c.l_c = {1e-11, 3e-12};
  c.l_c_to_r = Eigen::MatrixXd::Zero(2, 1);
  c.l_r_to_c = {1e-15};
  c.h_rr = {1e-8};
  c.l_r_to_r = Eigen::MatrixXd::Zero(1, 1);
  const PowerAllocation a{{20, 30}, {100}};
  const double n = 1e-13;
  LargeScaleCsi s = c;
  for (double& l : s.l_c) l *= 7.0;
  s.l_r_to_c[0] *= 7.0;
  const double r1 = ergodic_rate_approx(a, c, 2, n);
  const double r2 = ergodic_rate_approx(a, s, 2, 7.0 * n);
  CHECK(rel_err(r2, r1) < 1e-12);
  CHECK(rel_err(solve_fixed_point(a, s, 2, 7.0 * n).v_star, solve_fixed_point(a, c, 2, n).v_star) < 1e-12);
}

TEST_CASE("t* and the auxiliary functions") {
  const std::vector<double> a{2.0, 0.0, 0.5};
  const int nc = 3;
  const auto t = t_star(a, nc, 1.5);
  CHECK(t[1] == 0.0);
  CHECK(t_star(std::vector<double>{1.0}, 2, 2.0)[0] == doctest::Approx(0.5));
  for (double z = 1.0; z < 5.0; z += 0.1) CHECK(t_star(a, nc, z + 1e-3)[0] < t_star(a, nc, z)[0]);

  const std::vector<double> b{2.0, 0.7, 5.0};
  const double v = solve_fixed_point(b, nc).v_star;
  const double rap = ergodic_rate_approx(b, nc);
  CHECK(std::abs(aux_g(b, nc, v) - rap) < 1e-10);
  CHECK(std::abs(aux_G(v, t_star(b, nc, v), nc) - rap) < 1e-10);

  const std::vector<double> zero{0.0, 0.0};
  CHECK(aux_G(1.0, zero, 2) == 0.0);
  const std::vector<double> bad{0.3, 1.0};
  CHECK_THROWS_AS(aux_G(1.0, bad, 2), InvalidArgument);
}

TEST_CASE("g is increasing on [1, v*] and its derivative matches finite differences") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const int nc = 1 + static_cast<int>(rng() % 4);
    const std::size_t m = 1 + rng() % static_cast<std::size_t>(nc);
    std::vector<double> a(m);
    for (double& x : a) x = testing::log_uniform(rng, 1e-1, 1e4);
    const double v = solve_fixed_point(a, nc).v_star;
    for (int s = 0; s < 10; ++s) {
      const double z = 1.0 + (v - 1.0) * (s + 0.5) / 10.0;
      const double h = 1e-5 * z;
      const double fd = testing::central_difference([&](double x) { return aux_g(a, nc, x); }, z, h);
      CHECK(fd > 0.0);
      CHECK(rel_err(aux_g_derivative(a, nc, z), fd) < 1e-6);
    }
  }
}

TEST_CASE("G is increasing in every argument") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.01, 0.95);
  for (int k = 0; k < 100; ++k) {
    const int nc = 3;
    std::vector<double> t{u(rng), u(rng), u(rng)};
    const double z = 1.0 + 5.0 * u(rng);
    const double dz = testing::central_difference([&](double x) { return aux_G(x, t, nc); }, z, 1e-6);
    CHECK(dz > 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      auto f = [&](double x) {
        auto tt = t;
        tt[j] = x;
        return aux_G(z, tt, nc);
      };
      CHECK(testing::central_difference(f, t[j], 1e-6) > 0.0);
    }
  }
}
