// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "rmshare/errors.hpp"
#include "rmshare/scenario.hpp"

using namespace rmshare;

namespace {

Limits reference_limits() {
  Limits l;
  l.p_cmax = 40;
  l.p_csum = 100;
  l.p_rmax = 1000;
  l.p_rsum = 1500;
  l.r_req = 4;
  l.noise_power = dbm_to_watts(-107);
  l.pulses_per_cpi = 256;
  return l;
}

} // namespace

TEST_CASE("unit conversions") {
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(db_to_linear(30.0) == doctest::Approx(1000.0).epsilon(1e-14));
  // -107 dBm = 10^(-137/10) W
  CHECK(dbm_to_watts(-107.0) == doctest::Approx(1.99526231496888e-14).epsilon(1e-12));
  CHECK(watts_to_dbm(1.0) == doctest::Approx(30.0));
}

TEST_CASE("dB round trip over 26 decades") {
  for (double e = -20.0; e <= 6.0; e += 0.25) {
    const double x = std::pow(10.0, e) * 1.37;
    CHECK(std::abs(db_to_linear(linear_to_db(x)) - x) <= 1e-12 * x);
  }
}

TEST_CASE("equal split takes the smaller of share and cap") {
  CHECK(equal_split(100, 40, 3) == std::vector<double>(3, 100.0 / 3.0));
  CHECK(equal_split(100, 20, 3) == std::vector<double>(3, 20.0));
  CHECK(equal_split(100, 20, 0).empty());
}

TEST_CASE("validate_allocation") {
  const Limits l = reference_limits();
  SUBCASE("all zero is feasible") {
    CHECK(validate_allocation({{0, 0, 0}, {0, 0}}, l, 3, 2).empty());
  }
  SUBCASE("one element past its cap") {
    const auto v = validate_allocation({{l.p_cmax + 1, 0, 0}, {0, 0}}, l, 3, 2);
    REQUIRE(v.size() == 1);
    CHECK(v[0].value == l.p_cmax + 1);
    CHECK(v[0].limit == l.p_cmax);
  }
  SUBCASE("initial equal split is feasible") {
    const PowerAllocation a{equal_split(l.p_csum, l.p_cmax, 3), equal_split(l.p_rsum, l.p_rmax, 2)};
    CHECK(validate_allocation(a, l, 3, 2).empty());
  }
  SUBCASE("sum budget") {
    const auto v = validate_allocation({{40, 40, 40}, {0, 0}}, l, 3, 2);
    REQUIRE(v.size() == 1);
    CHECK(v[0].limit == l.p_csum);
  }
  SUBCASE("negative power") {
    CHECK(validate_allocation({{0, 0, 0}, {-1, 0}}, l, 3, 2).size() == 1);
  }
  SUBCASE("relative tolerance at the boundary") {
    CHECK(validate_allocation({{40 * (1 + 1e-10), 0, 0}, {0, 0}}, l, 3, 2).empty());
    CHECK(validate_allocation({{40 * (1 + 1e-8), 0, 0}, {0, 0}}, l, 3, 2).size() == 1);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(validate_allocation({{0, 0}, {0, 0}}, l, 3, 2), InvalidArgument);
  }
}

TEST_CASE("removing power never creates a violation") {
  const Limits l = reference_limits();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    PowerAllocation a{{u(rng) * 40, u(rng) * 40, u(rng) * 40}, {u(rng) * 1000, u(rng) * 1000}};
    if (!validate_allocation(a, l, 3, 2).empty()) continue;
    ++checked;
    for (double& p : a.p_c) p *= u(rng);
    for (double& p : a.p_r) p *= u(rng);
    CHECK(validate_allocation(a, l, 3, 2).empty());
  }
  CHECK(checked > 100);
}

TEST_CASE("topology and limit validation") {
  Topology t;
  t.bs_positions = {{0, 0}, {1, 1}, {2, 2}};
  t.radar_positions = {{5, 5}};
  t.user_antennas = 2;
  CHECK_THROWS_WITH_AS(validate_topology(t), doctest::Contains("N_c >= M_c"), ConfigError);
  t.user_antennas = 3;
  CHECK_NOTHROW(validate_topology(t));
  t.radar_positions.clear();
  CHECK_THROWS_AS(validate_topology(t), ConfigError);

  Limits l = reference_limits();
  CHECK_NOTHROW(validate_limits(l));
  l.p_cmax = 0;
  CHECK_THROWS_WITH_AS(validate_limits(l), doctest::Contains("p_cmax_w"), ConfigError);
  l = reference_limits();
  l.r_req = -1;
  CHECK_THROWS_AS(validate_limits(l), ConfigError);
  l = reference_limits();
  l.pulses_per_cpi = 1;
  CHECK_THROWS_AS(validate_limits(l), ConfigError);
}
