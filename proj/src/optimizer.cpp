// SPDX-License-Identifier: Apache-2.0
#include "rmshare/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rmshare/errors.hpp"
#include "rmshare/metrics.hpp"

namespace rmshare {

namespace {

constexpr double kLog2e = std::numbers::log2e;
constexpr double kOffFraction = 1e-9;
constexpr double kRateSlack = 1e-9;
constexpr double kCapSnap = 1e-6;
constexpr int kProbeMaxIter = 400;

using convex::Constraint;
using convex::Program;
using convex::SolveStatus;
using convex::TermKind;

bool pc_free(Variant v) { return v != Variant::RadarOnly; }
bool pr_free(Variant v) { return v != Variant::CommOnly; }

void add_linear(Constraint& c, const Slot& s, double coef) {
  if (coef == 0.0) return;
  if (s.free()) {
    c.linear.emplace_back(s.var, coef);
  } else {
    c.constant += coef * s.value;
  }
}

void add_term(Constraint& c, const Slot& s, TermKind kind, double coef) {
  if (coef == 0.0) return;
  if (s.free()) {
    c.terms.push_back({kind, s.var, coef});
  } else {
    c.constant += coef * convex::term_value(kind, s.value);
  }
}

// Strictly interior copy of a power vector: inside its box and under its budget.
std::vector<double> interior_powers(std::vector<double> p, double floor, double cap, double budget) {
  const double lo = floor + 1e-9 * cap;
  const double hi = cap * (1.0 - 1e-9);
  for (double& v : p) v = std::clamp(v, lo, hi);
  double sum = 0.0;
  for (double v : p) sum += v;
  const double limit = budget * (1.0 - 1e-9);
  if (sum > limit) {
    const double scale = budget * (1.0 - 1e-6) / sum;
    for (double& v : p) v = std::max(v * scale, lo);
  }
  return p;
}

enum class Objective { MinSinr, Rate };

Subproblem build_program(const IterationState& state, const SharingInstance& inst, const SubproblemOptions& opt,
                         Objective objective) {
  const Limits& lim = inst.limits;
  const LargeScaleCsi& csi = inst.csi;
  const std::size_t mc = inst.num_bs();
  const std::size_t mr = inst.num_radars();
  const double nc = static_cast<double>(inst.user_antennas);

  if (state.alloc.p_c.size() != mc || state.alloc.p_r.size() != mr || state.t.size() != mc) {
    throw InvalidArgument("subproblem anchor: dimension mismatch");
  }
  if (!(state.z >= 1.0 - 1e-12) || !std::isfinite(state.z)) {
    throw InfeasibleError("subproblem anchor: z = " + std::to_string(state.z) + " < 1");
  }
  for (double tj : state.t) {
    if (!(tj > 0.0 && tj < 1.0)) {
      throw InfeasibleError("subproblem anchor: t = " + std::to_string(tj) + " outside (0, 1)");
    }
  }
  if (objective == Objective::MinSinr && state.beta.size() != mr) {
    throw InvalidArgument("subproblem anchor: beta has wrong length");
  }

  Subproblem sub;
  Program& prog = sub.program;
  const bool free_c = pc_free(opt.variant);
  const bool free_r = pr_free(opt.variant);
  for (std::size_t j = 0; j < mc; ++j) {
    sub.p_c.push_back(free_c ? Slot{prog.add_var("p_c" + std::to_string(j)), 0.0} : Slot{-1, state.alloc.p_c[j]});
  }
  for (std::size_t i = 0; i < mr; ++i) {
    sub.p_r.push_back(free_r ? Slot{prog.add_var("p_r" + std::to_string(i)), 0.0} : Slot{-1, state.alloc.p_r[i]});
  }
  sub.z = prog.add_var("z");
  for (std::size_t j = 0; j < mc; ++j) sub.t.push_back(prog.add_var("t" + std::to_string(j)));
  sub.gamma = prog.add_var(objective == Objective::Rate ? "r" : "gamma");
  prog.objective(sub.gamma) = 1.0;

  const double zp = std::max(state.z, 1.0);

  // Rate row: linearised G minus R_req (or minus the rate epigraph variable).
  {
    Constraint& c = prog.add_constraint("rate");
    for (std::size_t j = 0; j < mc; ++j) {
      const double tp = state.t[j];
      c.constant -= kLog2e * (tp / (1.0 - tp) + std::log1p(-tp));
      c.linear.emplace_back(sub.t[j], kLog2e * tp / (1.0 - tp));
    }
    c.terms.push_back({TermKind::Log, sub.z, nc * kLog2e});
    if (objective == Objective::Rate) {
      c.linear.emplace_back(sub.gamma, -1.0);
    } else {
      c.constant -= lim.r_req;
    }
  }

  if (objective == Objective::MinSinr) {
    for (std::size_t i = 0; i < mr; ++i) {
      Constraint& c = prog.add_constraint("sinr" + std::to_string(i));
      const double b = state.beta[i];
      add_term(c, sub.p_r[i], TermKind::Sqrt, 2.0 * b * std::sqrt(csi.echo_gain(i)));
      for (std::size_t j = 0; j < mc; ++j) add_linear(c, sub.p_c[j], -b * b * csi.l_c_to_r(j, i));
      c.constant -= b * b * lim.noise_power;
      c.linear.emplace_back(sub.gamma, -1.0);
    }
  }

  {
    Constraint& c = prog.add_constraint("coupling");
    const double coef = 1.0 / (opt.coupling_uses_num_bs ? static_cast<double>(mc) : nc);
    c.constant = 2.0 / zp - 1.0;
    c.linear.emplace_back(sub.z, -1.0 / (zp * zp));
    for (std::size_t j = 0; j < mc; ++j) c.linear.emplace_back(sub.t[j], coef);
  }

  for (std::size_t j = 0; j < mc; ++j) {
    Constraint& c = prog.add_constraint("log" + std::to_string(j));
    const LinearizedLogSum lin = linearize_log_constraint(state.t[j], zp, state.alloc.p_r, csi, lim.noise_power);
    c.constant = std::log(nc * csi.l_c[j]) + 2.0 - std::log(lin.t_prev * lin.z_prev * lin.sigma_c2_prev);
    add_term(c, sub.p_c[j], TermKind::Log, 1.0);
    c.terms.push_back({TermKind::Log1m, sub.t[j], 1.0});
    c.linear.emplace_back(sub.t[j], -lin.derivative_t());
    c.linear.emplace_back(sub.z, -lin.derivative_z());
    for (std::size_t i = 0; i < mr; ++i) {
      const double d = lin.derivative_p_r(i);
      add_linear(c, sub.p_r[i], -d);
      c.constant += d * state.alloc.p_r[i];
    }
  }

  {
    Constraint& c = prog.add_constraint("z_min");
    c.constant = -1.0;
    c.linear.emplace_back(sub.z, 1.0);
  }
  for (std::size_t j = 0; j < mc; ++j) {
    Constraint& c = prog.add_constraint("t_min" + std::to_string(j));
    c.linear.emplace_back(sub.t[j], 1.0);
  }

  auto add_box = [&](const std::vector<Slot>& slots, const char* name, double floor, double cap, double budget) {
    bool any = false;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (!slots[k].free()) continue;
      any = true;
      Constraint& lo = prog.add_constraint(std::string(name) + "_lo" + std::to_string(k));
      lo.constant = -floor;
      lo.linear.emplace_back(slots[k].var, 1.0);
      Constraint& hi = prog.add_constraint(std::string(name) + "_hi" + std::to_string(k));
      hi.constant = cap;
      hi.linear.emplace_back(slots[k].var, -1.0);
    }
    if (!any) return;
    Constraint& sum = prog.add_constraint(std::string(name) + "_sum");
    sum.constant = budget;
    for (const Slot& s : slots) {
      if (s.free()) sum.linear.emplace_back(s.var, -1.0);
    }
  };
  const double floor_c = power_floor(lim.p_cmax, lim.p_csum, mc);
  const double floor_r = power_floor(lim.p_rmax, lim.p_rsum, mr);
  add_box(sub.p_c, "pc", floor_c, lim.p_cmax, lim.p_csum);
  add_box(sub.p_r, "pr", floor_r, lim.p_rmax, lim.p_rsum);

  // Start point: the anchor, pulled strictly inside the power boxes.
  PowerAllocation start;
  start.p_c = free_c ? interior_powers(state.alloc.p_c, floor_c, lim.p_cmax, lim.p_csum) : state.alloc.p_c;
  start.p_r = free_r ? interior_powers(state.alloc.p_r, floor_r, lim.p_rmax, lim.p_rsum) : state.alloc.p_r;
  sub.start = encode(sub, start, zp, state.t, 0.0);
  double worst = std::numeric_limits<double>::infinity();
  for (const Constraint& c : prog.constraints) {
    const bool has_objective_var =
        std::any_of(c.linear.begin(), c.linear.end(), [&](const auto& lc) { return lc.first == sub.gamma; });
    if (has_objective_var) worst = std::min(worst, c.value(sub.start));
  }
  if (std::isfinite(worst)) sub.start(sub.gamma) = worst - 1e-6 * (1.0 + std::abs(worst));
  return sub;
}

IterationState anchor_at(const PowerAllocation& alloc, const SharingInstance& inst) {
  IterationState s;
  s.alloc = alloc;
  const auto a = link_snrs(alloc, inst.csi, inst.limits.noise_power);
  s.z = solve_fixed_point(a, inst.user_antennas).v_star;
  s.t = t_star(a, inst.user_antennas, s.z);
  return s;
}

double min_surrogate(const PowerAllocation& alloc, const SharingInstance& inst, std::span<const double> beta) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.num_radars(); ++i) {
    m = std::min(m, quadratic_transform_value(alloc, inst, i, beta[i]));
  }
  return m;
}

double rate_of(const PowerAllocation& alloc, const SharingInstance& inst) {
  return ergodic_rate_approx(alloc, inst.csi, inst.user_antennas, inst.limits.noise_power);
}

double min_sinr_of(const PowerAllocation& alloc, const SharingInstance& inst) {
  return min_radar_sinr(alloc, inst.csi, inst.limits.noise_power);
}

// Moves a converged point onto the constraint boundary it is within solver tolerance of.
// Each move keeps budgets and the rate target and never lowers the smallest radar SINR.
PowerAllocation polish(PowerAllocation alloc, const SharingInstance& inst, Variant variant) {
  const Limits& lim = inst.limits;
  if (pr_free(variant)) {
    for (std::size_t i = 0; i < alloc.p_r.size(); ++i) {
      if (alloc.p_r[i] == lim.p_rmax || alloc.p_r[i] < lim.p_rmax * (1.0 - kCapSnap)) continue;
      PowerAllocation trial = alloc;
      trial.p_r[i] = lim.p_rmax;
      double s = 0.0;
      for (double p : trial.p_r) s += p;
      if (s <= lim.p_rsum && rate_of(trial, inst) >= lim.r_req - kRateSlack &&
          min_sinr_of(trial, inst) >= min_sinr_of(alloc, inst)) {
        alloc = trial;
      }
    }
  }
  if (pc_free(variant)) {
    // Common BS back-off: the rate is increasing in the scale, every radar SINR decreasing.
    auto scaled = [&](double s) {
      PowerAllocation a = alloc;
      for (double& p : a.p_c) p *= s;
      return a;
    };
    const double target = lim.r_req;
    double s = 1.0;
    if (rate_of(scaled(0.0), inst) >= target) {
      s = 0.0;
    } else if (rate_of(alloc, inst) > target) {
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 100 && hi - lo > 1e-15; ++k) {
        const double mid = 0.5 * (lo + hi);
        (rate_of(scaled(mid), inst) >= target ? hi : lo) = mid;
      }
      s = hi;
    }
    if (s < 1.0) {
      PowerAllocation trial = scaled(s);
      if (min_sinr_of(trial, inst) >= min_sinr_of(alloc, inst)) alloc = std::move(trial);
    }
  }
  if (pr_free(variant)) {
    // Radars off the min-SINR path take up unused budget when the rate target allows it.
    for (std::size_t i = 0; i < alloc.p_r.size(); ++i) {
      double s = 0.0;
      for (double p : alloc.p_r) s += p;
      const double room = std::min(lim.p_rmax - alloc.p_r[i], lim.p_rsum - s);
      if (!(room > 0.0)) continue;
      PowerAllocation trial = alloc;
      trial.p_r[i] += room;
      if (rate_of(trial, inst) >= lim.r_req && min_sinr_of(trial, inst) >= min_sinr_of(alloc, inst)) {
        alloc = std::move(trial);
      }
    }
  }
  return alloc;
}

bool usable(const SubproblemSolution& sol, const Subproblem& sub) {
  if (sol.status == SolveStatus::Optimal) return true;
  if (sol.status == SolveStatus::Infeasible) return false;
  return sub.program.strictly_feasible(encode(sub, sol.alloc, sol.z, sol.t, sol.objective));
}

} // namespace

void validate_instance(const SharingInstance& inst) {
  validate_limits(inst.limits);
  const auto& c = inst.csi;
  const std::size_t mc = c.num_bs(), mr = c.num_radars();
  if (mc == 0 || mr == 0) throw InvalidArgument("instance: need at least one BS and one radar");
  if (inst.user_antennas < static_cast<int>(mc)) throw InvalidArgument("instance: N_c >= M_c required");
  if (c.l_c_to_r.rows() != static_cast<Eigen::Index>(mc) || c.l_c_to_r.cols() != static_cast<Eigen::Index>(mr) ||
      c.h_rr.size() != mr) {
    throw InvalidArgument("instance: CSI dimensions inconsistent");
  }
  for (double v : c.l_c) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("instance: BS-user gain must be positive");
  }
  for (std::size_t i = 0; i < mr; ++i) {
    if (!(c.echo_gain(i) > 0.0)) throw InvalidArgument("instance: radar echo gain must be positive");
  }
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Joint: return "proposed";
    case Variant::CommOnly: return "unilateral_c";
    case Variant::RadarOnly: return "unilateral_r";
  }
  return "?";
}

double power_floor(double cap, double budget, std::size_t count) {
  if (count == 0) return kPowerFloor;
  return std::min(kPowerFloor, 1e-6 * std::min(cap, budget / static_cast<double>(count)));
}

std::vector<double> beta_update(const PowerAllocation& alloc, const SharingInstance& inst) {
  std::vector<double> beta(inst.num_radars());
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double sigma = radar_interference(alloc.p_c, inst.csi, i, inst.limits.noise_power);
    beta[i] = std::sqrt(inst.csi.echo_gain(i) * std::max(alloc.p_r[i], 0.0)) / sigma;
  }
  return beta;
}

double quadratic_transform_value(const PowerAllocation& alloc, const SharingInstance& inst, std::size_t radar,
                                 double beta) {
  const double sigma = radar_interference(alloc.p_c, inst.csi, radar, inst.limits.noise_power);
  return 2.0 * beta * std::sqrt(inst.csi.echo_gain(radar) * std::max(alloc.p_r[radar], 0.0)) - beta * beta * sigma;
}

double LinearizedG::value(double z, std::span<const double> t) const {
  double v = static_cast<double>(user_antennas) * std::log2(z);
  for (std::size_t j = 0; j < t_prev.size(); ++j) {
    const double tp = t_prev[j];
    v -= kLog2e * (tp * (1.0 - t[j]) / (1.0 - tp) + std::log1p(-tp));
  }
  return v;
}

std::vector<double> LinearizedG::gradient_t() const {
  std::vector<double> g(t_prev.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = kLog2e * t_prev[j] / (1.0 - t_prev[j]);
  return g;
}

double LinearizedG::derivative_z(double z) const { return static_cast<double>(user_antennas) * kLog2e / z; }

LinearizedG linearize_G(std::span<const double> t_prev, int user_antennas) {
  for (double t : t_prev) {
    if (!(t >= 0.0 && t < 1.0)) throw InvalidArgument("linearize_G: t must lie in [0, 1)");
  }
  return {std::vector<double>(t_prev.begin(), t_prev.end()), user_antennas};
}

double LinearizedLogSum::value(double t, double z, std::span<const double> p_r) const {
  double v = (t - t_prev) / t_prev + (z - z_prev) / z_prev + std::log(t_prev * z_prev * sigma_c2_prev);
  for (std::size_t i = 0; i < p_r.size(); ++i) v += l_r_to_c[i] * (p_r[i] - p_r_prev[i]) / sigma_c2_prev;
  return v;
}

LinearizedLogSum linearize_log_constraint(double t_prev, double z_prev, std::span<const double> p_r_prev,
                                          const LargeScaleCsi& csi, double noise_power) {
  if (!(t_prev > 0.0) || !(z_prev > 0.0)) throw InvalidArgument("linearize_log_constraint: anchor must be positive");
  LinearizedLogSum lin;
  lin.t_prev = t_prev;
  lin.z_prev = z_prev;
  lin.p_r_prev.assign(p_r_prev.begin(), p_r_prev.end());
  lin.l_r_to_c = csi.l_r_to_c;
  lin.sigma_c2_prev = comm_interference(p_r_prev, csi.l_r_to_c, noise_power);
  return lin;
}

Subproblem build_subproblem(const IterationState& state, const SharingInstance& inst, const SubproblemOptions& options) {
  return build_program(state, inst, options, Objective::MinSinr);
}

Eigen::VectorXd encode(const Subproblem& sub, const PowerAllocation& alloc, double z, std::span<const double> t,
                       double objective) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sub.program.num_vars());
  for (std::size_t j = 0; j < sub.p_c.size(); ++j) {
    if (sub.p_c[j].free()) x(sub.p_c[j].var) = alloc.p_c[j];
  }
  for (std::size_t i = 0; i < sub.p_r.size(); ++i) {
    if (sub.p_r[i].free()) x(sub.p_r[i].var) = alloc.p_r[i];
  }
  x(sub.z) = z;
  for (std::size_t j = 0; j < sub.t.size(); ++j) x(sub.t[j]) = t[j];
  x(sub.gamma) = objective;
  return x;
}

SubproblemSolution decode(const Subproblem& sub, const Eigen::VectorXd& x) {
  SubproblemSolution s;
  for (const Slot& sl : sub.p_c) s.alloc.p_c.push_back(sl.free() ? x(sl.var) : sl.value);
  for (const Slot& sl : sub.p_r) s.alloc.p_r.push_back(sl.free() ? x(sl.var) : sl.value);
  s.z = x(sub.z);
  for (int v : sub.t) s.t.push_back(x(v));
  s.objective = x(sub.gamma);
  return s;
}

SubproblemSolution solve_subproblem(const Subproblem& sub, const convex::BarrierOptions& options) {
  const convex::BarrierResult res = convex::solve_barrier(sub.program, sub.start, options);
  SubproblemSolution s = decode(sub, res.x);
  s.status = res.status;
  s.newton_steps = res.newton_steps;
  return s;
}

AllocationResult allocate(const SharingInstance& inst, const AllocateOptions& options) {
  validate_instance(inst);
  const Limits& lim = inst.limits;
  const std::size_t mc = inst.num_bs(), mr = inst.num_radars();
  const SubproblemOptions sub_opt{options.variant, options.coupling_uses_num_bs};

  PowerAllocation init;
  init.p_c = equal_split(lim.p_csum, lim.p_cmax, mc);
  init.p_r = pr_free(options.variant) ? std::vector<double>(mr, 0.0) : equal_split(lim.p_rsum, lim.p_rmax, mr);

  // Rate feasibility: the largest R_ap available with the radars at their starting powers.
  std::optional<ProbeResult> probe;
  if (rate_of(init, inst) < lim.r_req) {
    if (!pc_free(options.variant)) {
      throw InfeasibleError("R_req = " + std::to_string(lim.r_req) + " exceeds the rate of the fixed BS powers");
    }
    probe = feasibility_probe(inst, init.p_r);
    if (probe->rate < lim.r_req - kRateSlack) {
      std::ostringstream os;
      os << "R_req = " << lim.r_req << " exceeds the largest achievable rate " << probe->rate;
      throw InfeasibleError(os.str());
    }
  }

  AllocationResult out;
  SolveReport& rep = out.report;
  IterationState state = anchor_at(init, inst);
  double gamma_prev = 0.0;

  for (int k = 1; k <= options.max_iter; ++k) {
    state.iteration = k;
    state.beta = beta_update(state.alloc, inst);
    Subproblem sub = build_subproblem(state, inst, sub_opt);
    SubproblemSolution sol = solve_subproblem(sub, options.barrier);

    if (!usable(sol, sub) && k == 1 && !rep.fallback_anchor) {
      // The equal split can sit where the convexified rate row is empty; restart from the
      // rate-maximising BS powers, which always leave room.
      if (!probe) probe = feasibility_probe(inst, init.p_r);
      PowerAllocation anchor{probe->p_c, init.p_r};
      state = anchor_at(anchor, inst);
      state.iteration = k;
      state.beta = beta_update(state.alloc, inst);
      rep.fallback_anchor = true;
      sub = build_subproblem(state, inst, sub_opt);
      sol = solve_subproblem(sub, options.barrier);
    }
    rep.subproblem_status.push_back(sol.status);
    if (!usable(sol, sub)) {
      throw NumericalError("iteration " + std::to_string(k) + ": subproblem " + convex::to_string(sol.status));
    }

    double gamma = min_surrogate(sol.alloc, inst, state.beta);
    if (k > 1) {
      // Guard against solver round-off: the previous point stays feasible for this program.
      const double g_prev = min_surrogate(state.alloc, inst, state.beta);
      const Eigen::VectorXd x_prev = encode(sub, state.alloc, state.z, state.t, g_prev);
      if (g_prev > gamma && sub.program.min_constraint(x_prev) >= -1e-12) {
        sol.alloc = state.alloc;
        sol.z = state.z;
        sol.t = state.t;
        gamma = g_prev;
      }
    }

    rep.gamma_trace.push_back(gamma);
    rep.rate_trace.push_back(rate_of(sol.alloc, inst));
    rep.min_sinr_trace.push_back(min_radar_sinr(sol.alloc, inst.csi, lim.noise_power));
    rep.iterations = k;

    state.alloc = sol.alloc;
    state.z = std::max(sol.z, 1.0);
    state.t = sol.t;
    for (double& t : state.t) t = std::clamp(t, 1e-300, 1.0 - 1e-15);

    if (gamma > 0.0 && std::abs(gamma - gamma_prev) <= options.epsilon * gamma) {
      rep.converged = true;
      break;
    }
    gamma_prev = gamma;
  }

  // Elements parked at the barrier floor are reported as switched off.
  PowerAllocation alloc = state.alloc;
  if (pr_free(options.variant)) {
    for (double& p : alloc.p_r) {
      if (p <= kOffFraction * lim.p_rmax) p = 0.0;
    }
  }
  if (pc_free(options.variant)) {
    for (std::size_t j = 0; j < mc; ++j) {
      if (alloc.p_c[j] > kOffFraction * lim.p_cmax) continue;
      PowerAllocation trial = alloc;
      trial.p_c[j] = 0.0;
      if (rate_of(trial, inst) >= lim.r_req - kRateSlack) alloc = trial;
    }
  }
  alloc = polish(std::move(alloc), inst, options.variant);
  out.alloc = alloc;
  rep.rate_achieved = rate_of(alloc, inst);
  rep.min_sinr = min_radar_sinr(alloc, inst.csi, lim.noise_power);
  return out;
}

void write_trace_csv(const SolveReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os.precision(12);
  os << "iteration,gamma,rate_ap\n";
  for (std::size_t k = 0; k < report.gamma_trace.size(); ++k) {
    os << k + 1 << ',' << report.gamma_trace[k] << ',' << report.rate_trace[k] << '\n';
  }
}

ProbeResult feasibility_probe(const SharingInstance& inst, std::optional<std::vector<double>> p_r) {
  validate_instance(inst);
  const Limits& lim = inst.limits;
  PowerAllocation alloc;
  alloc.p_c = equal_split(lim.p_csum, lim.p_cmax, inst.num_bs());
  alloc.p_r = p_r ? *p_r : std::vector<double>(inst.num_radars(), 0.0);
  if (alloc.p_r.size() != inst.num_radars()) throw InvalidArgument("feasibility_probe: p_r has wrong length");

  const SubproblemOptions opt{Variant::CommOnly, false};
  ProbeResult best{rate_of(alloc, inst), alloc.p_c, 0};
  IterationState state = anchor_at(alloc, inst);
  double last = best.rate;
  for (int k = 1; k <= kProbeMaxIter; ++k) {
    Subproblem sub = build_program(state, inst, opt, Objective::Rate);
    SubproblemSolution sol = solve_subproblem(sub);
    best.iterations = k;
    if (!usable(sol, sub)) break;
    const double r = rate_of(sol.alloc, inst);
    if (r > best.rate) {
      best.rate = r;
      best.p_c = sol.alloc.p_c;
    }
    state.alloc = sol.alloc;
    state.z = std::max(sol.z, 1.0);
    state.t = sol.t;
    for (double& t : state.t) t = std::clamp(t, 1e-300, 1.0 - 1e-15);
    if (std::abs(r - last) <= 1e-10 * std::max(1.0, std::abs(r))) break;
    last = r;
  }
  return best;
}

} // namespace rmshare
