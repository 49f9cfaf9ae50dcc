// SPDX-License-Identifier: Apache-2.0
#include "rmshare/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "rmshare/errors.hpp"

namespace rmshare {

namespace {

constexpr double kLog2e = std::numbers::log2e;

void require_index(std::size_t radar, const LargeScaleCsi& csi) {
  if (radar >= csi.num_radars()) throw InvalidArgument("radar index out of range");
}

} // namespace

double radar_interference(std::span<const double> p_c, const LargeScaleCsi& csi, std::size_t radar,
                          double noise_power) {
  require_index(radar, csi);
  if (p_c.size() != csi.num_bs()) throw InvalidArgument("radar_interference: p_c length mismatch");
  double sum = noise_power;
  for (std::size_t j = 0; j < p_c.size(); ++j) {
    sum += csi.l_c_to_r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(radar)) * p_c[j];
  }
  return sum;
}

double radar_sinr(const PowerAllocation& alloc, const LargeScaleCsi& csi, std::size_t radar, double noise_power) {
  require_index(radar, csi);
  return alloc.p_r.at(radar) * csi.echo_gain(radar) / radar_interference(alloc.p_c, csi, radar, noise_power);
}

double min_radar_sinr(const PowerAllocation& alloc, const LargeScaleCsi& csi, double noise_power) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < csi.num_radars(); ++i) best = std::min(best, radar_sinr(alloc, csi, i, noise_power));
  return best;
}

double radar_sinr_with_ambiguity(const PowerAllocation& alloc, const LargeScaleCsi& csi, std::size_t radar,
                                 double noise_power, double chi_auto, std::span<const double> chi_cross) {
  require_index(radar, csi);
  if (chi_cross.size() != csi.num_radars()) throw InvalidArgument("chi_cross length must equal radar count");
  double signal = alloc.p_r.at(radar) * csi.echo_gain(radar) * chi_auto * chi_auto;
  double denom = radar_interference(alloc.p_c, csi, radar, noise_power);
  for (std::size_t j = 0; j < csi.num_radars(); ++j) {
    if (j == radar) continue;
    double chi = chi_cross[j];
    denom += alloc.p_r.at(j) * csi.l_r_to_r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(radar)) * chi * chi;
  }
  return signal / denom;
}

double detection_threshold(double p_fa, int pulses) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw InvalidArgument("detection_threshold: p_fa must lie in (0, 1)");
  if (pulses < 2) throw InvalidArgument("detection_threshold: at least two pulses required");
  // 1 - exp(ln(p)/(N-1)) without cancellation
  return -std::expm1(std::log(p_fa) / (pulses - 1));
}


double detection_probability(double rho, double mu, int pulses) {
  if (!(rho >= 0.0)) throw InvalidArgument("detection_probability: rho must be >= 0");
  if (!(mu > 0.0 && mu < 1.0)) throw InvalidArgument("detection_probability: mu must lie in (0, 1)");
  if (std::isinf(rho)) return 1.0;
  double x = (mu / (1.0 - mu)) / (1.0 + pulses * rho);
  return std::exp((1.0 - pulses) * std::log1p(x));
}

// Same expression at rho = 0 so that P_D(0) reproduces P_F bit for bit.
double false_alarm_probability(double mu, int pulses) { return detection_probability(0.0, mu, pulses); }

double comm_interference(std::span<const double> p_r, std::span<const double> l_r_to_c, double noise_power) {
  if (p_r.size() != l_r_to_c.size()) throw InvalidArgument("comm_interference: length mismatch");
  double sum = noise_power;
  for (std::size_t i = 0; i < p_r.size(); ++i) sum += l_r_to_c[i] * p_r[i];
  return sum;
}

std::vector<double> link_snrs(const PowerAllocation& alloc, const LargeScaleCsi& csi, double noise_power) {
  if (alloc.p_c.size() != csi.num_bs()) throw InvalidArgument("link_snrs: p_c length mismatch");
  double sigma_c2 = comm_interference(alloc.p_r, csi.l_r_to_c, noise_power);
  std::vector<double> a(csi.num_bs());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = csi.l_c[j] * alloc.p_c[j] / sigma_c2;
  return a;
}

// ---------------------------------------------------------------------------
// Monte Carlo ergodic rate
// ---------------------------------------------------------------------------

namespace {

constexpr long kChunk = 2048;

struct ChunkSum {
  double sum = 0.0;
  double sum_sq = 0.0;
  long count = 0;
};

ChunkSum run_chunk(const Eigen::VectorXd& amp, int nc, long count, std::uint64_t seed, long chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 rng(seq);
  const auto mc = static_cast<int>(amp.size());
  ChunkSum out;
  Eigen::MatrixXcd gram(mc, mc);
  for (long s = 0; s < count; ++s) {
    SmallScaleDraw draw = sample_small_scale(rng, mc, nc);
    Eigen::MatrixXcd b = amp.asDiagonal() * draw.s_c;
    gram.noalias() = b * b.adjoint();
    gram.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    double logdet = 0.0;
    for (int k = 0; k < mc; ++k) logdet += std::log(llt.matrixLLT()(k, k).real());
    double rate = 2.0 * kLog2e * logdet;
    out.sum += rate;
    out.sum_sq += rate * rate;
  }
  out.count = count;
  return out;
}

} // namespace

RateEstimate ergodic_rate_mc(std::span<const double> p_c, std::span<const double> l_c, double sigma_c2,
                             int user_antennas, long samples, std::uint64_t seed, int workers) {
  if (samples < 1) throw InvalidArgument("ergodic_rate_mc: samples must be >= 1");
  if (p_c.size() != l_c.size()) throw InvalidArgument("ergodic_rate_mc: length mismatch");
  if (user_antennas < 1) throw InvalidArgument("ergodic_rate_mc: user_antennas must be >= 1");
  Eigen::VectorXd amp(static_cast<Eigen::Index>(p_c.size()));
  for (std::size_t j = 0; j < p_c.size(); ++j) amp(static_cast<Eigen::Index>(j)) = std::sqrt(l_c[j] * p_c[j] / sigma_c2);

  const long chunks = (samples + kChunk - 1) / kChunk;
  std::vector<ChunkSum> parts(static_cast<std::size_t>(chunks));
  auto work = [&](long k) {
    long count = std::min(kChunk, samples - k * kChunk);
    parts[static_cast<std::size_t>(k)] = run_chunk(amp, user_antennas, count, seed, k);
  };
  int threads = std::clamp<int>(workers, 1, static_cast<int>(std::min<long>(chunks, 64)));
  if (threads == 1) {
    for (long k = 0; k < chunks; ++k) work(k);
  } else {
    std::atomic<long> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (long k = next++; k < chunks; k = next++) work(k);
      });
    }
  }
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& part : parts) {
    sum += part.sum;
    sum_sq += part.sum_sq;
  }
  const double n = static_cast<double>(samples);
  RateEstimate est;
  est.mean = sum / n;
  double var = samples > 1 ? std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0)) : 0.0;
  est.std_error = std::sqrt(var / n);
  return est;
}

RateEstimate ergodic_rate_mc(const PowerAllocation& alloc, const LargeScaleCsi& csi, int user_antennas,
                             double noise_power, long samples, std::uint64_t seed, int workers) {
  double sigma_c2 = comm_interference(alloc.p_r, csi.l_r_to_c, noise_power);
  return ergodic_rate_mc(alloc.p_c, csi.l_c, sigma_c2, user_antennas, samples, seed, workers);
}

// ---------------------------------------------------------------------------
// Deterministic equivalent
// ---------------------------------------------------------------------------

double fixed_point_residual(std::span<const double> snrs, int user_antennas, double v) {
  double r = 1.0 - 1.0 / v;
  for (double a : snrs) r -= a / (v + user_antennas * a);
  return r;
}

FixedPoint solve_fixed_point(std::span<const double> snrs, int user_antennas, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("solve_fixed_point: tol must be > 0");
  double total = 0.0;
  for (double a : snrs) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("solve_fixed_point: SNRs must be finite and >= 0");
    total += a;
  }
  FixedPoint fp;
  if (total == 0.0) return fp; // 1 - 1/v = 0

  double lo = 1.0;
  double hi = 1.0 + user_antennas * total;
  int it = 0;
  for (; it < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (fixed_point_residual(snrs, user_antennas, mid) < 0.0) lo = mid;
    else hi = mid;
  }
  double v = 0.5 * (lo + hi);
  // Newton polish inside the bracket
  for (int k = 0; k < 3; ++k) {
    double f = fixed_point_residual(snrs, user_antennas, v);
    double df = 1.0 / (v * v);
    for (double a : snrs) df += a / ((v + user_antennas * a) * (v + user_antennas * a));
    double next = v - f / df;
    if (next >= lo && next <= hi) v = next;
    ++it;
  }
  fp.v_star = std::max(v, 1.0);
  fp.residual = fixed_point_residual(snrs, user_antennas, fp.v_star);
  fp.iterations = it;
  if (!(std::abs(fp.residual) <= tol)) {
    throw NumericalError("solve_fixed_point: residual " + std::to_string(fp.residual) + " above tolerance");
  }
  return fp;
}

FixedPoint solve_fixed_point(const PowerAllocation& alloc, const LargeScaleCsi& csi, int user_antennas,
                             double noise_power, double tol) {
  return solve_fixed_point(link_snrs(alloc, csi, noise_power), user_antennas, tol);
}

double ergodic_rate_approx(std::span<const double> snrs, int user_antennas) {
  const double v = solve_fixed_point(snrs, user_antennas).v_star;
  double r = 0.0;
  for (double a : snrs) r += std::log2(1.0 + user_antennas * a / v);
  r += user_antennas * std::log2(v) - user_antennas * kLog2e * (1.0 - 1.0 / v);
  return r;
}

double ergodic_rate_approx(const PowerAllocation& alloc, const LargeScaleCsi& csi, int user_antennas,
                           double noise_power) {
  return ergodic_rate_approx(link_snrs(alloc, csi, noise_power), user_antennas);
}

std::vector<double> t_star(std::span<const double> snrs, int user_antennas, double z) {
  if (!(z >= 1.0)) throw InvalidArgument("t_star: z must be >= 1");
  std::vector<double> t(snrs.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    double num = user_antennas * snrs[j];
    t[j] = num / (z + num);
  }
  return t;
}

double aux_g(std::span<const double> snrs, int user_antennas, double z) {
  if (!(z >= 1.0)) throw InvalidArgument("aux_g: z must be >= 1");
  double g = user_antennas * std::log2(z);
  for (double a : snrs) {
    double na = user_antennas * a;
    g += std::log2(1.0 + na / z) - user_antennas * kLog2e * a / (z + na);
  }
  return g;
}

double aux_g_derivative(std::span<const double> snrs, int user_antennas, double z) {
  double s = user_antennas;
  for (double t : t_star(snrs, user_antennas, z)) s -= t * t;
  return kLog2e / z * s;
}

double aux_G(double z, std::span<const double> t, int user_antennas) {
  if (!(z >= 1.0)) throw InvalidArgument("aux_G: z must be >= 1");
  double sum = 0.0;
  for (double tj : t) {
    if (!(tj >= 0.0 && tj < 1.0)) throw InvalidArgument("aux_G: every t_j must lie in [0, 1)");
    sum += tj + std::log1p(-tj);
  }
  return -kLog2e * sum + user_antennas * std::log2(z);
}

} // namespace rmshare
