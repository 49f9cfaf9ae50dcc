// SPDX-License-Identifier: Apache-2.0
#include "rmshare/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmshare::convex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double first_derivative(TermKind kind, double x) {
  switch (kind) {
  case TermKind::Sqrt: return 0.5 / std::sqrt(x);
  case TermKind::Log: return 1.0 / x;
  case TermKind::Log1m: return -1.0 / (1.0 - x);
  }
  return 0.0;
}

double second_derivative(TermKind kind, double x) {
  switch (kind) {
  case TermKind::Sqrt: return -0.25 / (x * std::sqrt(x));
  case TermKind::Log: return -1.0 / (x * x);
  case TermKind::Log1m: return -1.0 / ((1.0 - x) * (1.0 - x));
  }
  return 0.0;
}

} // namespace

double term_value(TermKind kind, double x) {
  switch (kind) {
  case TermKind::Sqrt: return std::sqrt(x);
  case TermKind::Log: return std::log(x);
  case TermKind::Log1m: return std::log1p(-x);
  }
  return 0.0;
}

bool term_in_domain(TermKind kind, double x) {
  switch (kind) {
  case TermKind::Sqrt:
  case TermKind::Log: return x > 0.0 && std::isfinite(x);
  case TermKind::Log1m: return x < 1.0 && std::isfinite(x);
  }
  return false;
}

double Constraint::value(const Eigen::VectorXd& x) const {
  double f = constant;
  for (const auto& [var, a] : linear) f += a * x(var);
  for (const auto& t : terms) f += t.coef * term_value(t.kind, x(t.var));
  return f;
}

bool Constraint::in_domain(const Eigen::VectorXd& x) const {
  return std::all_of(terms.begin(), terms.end(), [&](const Term& t) { return term_in_domain(t.kind, x(t.var)); });
}

void Constraint::derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::VectorXd& hess_diag) const {
  grad.setZero(x.size());
  hess_diag.setZero(x.size());
  for (const auto& [var, a] : linear) grad(var) += a;
  for (const auto& t : terms) {
    grad(t.var) += t.coef * first_derivative(t.kind, x(t.var));
    hess_diag(t.var) += t.coef * second_derivative(t.kind, x(t.var));
  }
}

int Program::add_var(std::string name) {
  var_names.push_back(std::move(name));
  objective.conservativeResize(num_vars());
  objective(num_vars() - 1) = 0.0;
  return num_vars() - 1;
}

Constraint& Program::add_constraint(std::string label) {
  constraints.push_back(Constraint{std::move(label), 0.0, {}, {}});
  return constraints.back();
}

double Program::min_constraint(const Eigen::VectorXd& x) const {
  double m = kInf;
  for (const auto& c : constraints) {
    if (!c.in_domain(x)) return -kInf;
    m = std::min(m, c.value(x));
  }
  return m;
}

bool Program::strictly_feasible(const Eigen::VectorXd& x) const { return min_constraint(x) > 0.0; }

const char* to_string(SolveStatus status) {
  switch (status) {
  case SolveStatus::Optimal: return "optimal";
  case SolveStatus::Infeasible: return "infeasible";
  case SolveStatus::MaxIterations: return "max_iterations";
  case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

/// Barrier objective  -t c^T x - sum ln f_k(x); +inf outside the strict interior.
double barrier_value(const Program& p, const Eigen::VectorXd& x, double t) {
  double v = -t * p.objective_value(x);
  for (const auto& c : p.constraints) {
    if (!c.in_domain(x)) return kInf;
    double f = c.value(x);
    if (!(f > 0.0)) return kInf;
    v -= std::log(f);
  }
  return std::isfinite(v) ? v : kInf;
}

enum class CenterOutcome { Converged, Stalled, Budget };

/// Newton's method on the barrier objective for fixed t. `stop_early` is polled after each step.
template <typename StopFn>
CenterOutcome center(const Program& p, Eigen::VectorXd& x, double t, const BarrierOptions& opt, int& steps,
                     StopFn&& stop_early) {
  const int n = p.num_vars();
  Eigen::VectorXd grad(n), g(n), h(n), dx(n);
  Eigen::MatrixXd hess(n, n);
  for (;;) {
    if (steps >= opt.max_newton_steps) return CenterOutcome::Budget;
    grad = -t * p.objective;
    hess.setZero();
    for (const auto& c : p.constraints) {
      double f = c.value(x);
      c.derivatives(x, g, h);
      grad -= g / f;
      hess.noalias() += (g * g.transpose()) / (f * f);
      hess.diagonal() -= h / f;
    }
    // symmetric Jacobi scaling before factorising
    Eigen::VectorXd d = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd scaled = d.asDiagonal() * hess * d.asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    double ridge = 0.0;
    while (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      ridge = ridge == 0.0 ? 1e-12 : ridge * 100.0;
      if (ridge > 1e2) return CenterOutcome::Stalled;
      ldlt.compute(scaled + ridge * Eigen::MatrixXd::Identity(n, n));
    }
    dx = d.asDiagonal() * ldlt.solve(-(d.asDiagonal() * grad));
    double decrement2 = -grad.dot(dx);
    if (!std::isfinite(decrement2)) return CenterOutcome::Stalled;
    if (decrement2 * 0.5 <= opt.newton_tol) return CenterOutcome::Converged;

    double phi = barrier_value(p, x, t);
    if (0.25 * decrement2 <= 1e-15 * (1.0 + std::abs(phi))) {
      // the predicted decrease is below the resolution of phi: centred to working precision
      Eigen::VectorXd full = x + dx;
      if (std::isfinite(barrier_value(p, full, t))) x = full;
      ++steps;
      return CenterOutcome::Converged;
    }
    double alpha = 1.0;
    Eigen::VectorXd trial;
    for (;;) {
      trial = x + alpha * dx;
      double v = barrier_value(p, trial, t);
      if (v <= phi - 0.25 * alpha * decrement2) break;
      alpha *= 0.5;
      if (alpha < 1e-20) return CenterOutcome::Stalled;
    }
    x = trial;
    ++steps;
    if (stop_early(x)) return CenterOutcome::Converged;
  }
}

/// Maximize s subject to f_k(x) - s >= 0, stopping as soon as a strictly feasible x is found.
/// The objective direction is boxed to a wide window below the start so the phase-one barrier
/// stays bounded when some variable only appears in constraints that it can relax.
bool phase_one(const Program& p, Eigen::VectorXd& x, const BarrierOptions& opt, int& steps) {
  const int n = p.num_vars();
  Program aux;
  aux.var_names = p.var_names;
  aux.var_names.push_back("__slack");
  const int s_var = n;
  aux.objective = Eigen::VectorXd::Zero(n + 1);
  aux.objective(s_var) = 1.0;
  for (const auto& c : p.constraints) {
    Constraint shifted = c;
    shifted.linear.emplace_back(s_var, -1.0);
    aux.constraints.push_back(std::move(shifted));
  }
  if (p.objective.squaredNorm() > 0.0) {
    double c0 = p.objective_value(x);
    Constraint floor;
    floor.label = "__objective_window";
    floor.constant = 1e6 * (1.0 + std::abs(c0)) - c0;
    for (int i = 0; i < n; ++i) {
      if (p.objective(i) != 0.0) floor.linear.emplace_back(i, p.objective(i));
    }
    aux.constraints.push_back(std::move(floor));
  }

  double m0 = p.min_constraint(x);
  if (!std::isfinite(m0)) return false;
  Eigen::VectorXd y(n + 1);
  y.head(n) = x;
  y(s_var) = m0 - 1e-3 * (1.0 + std::abs(m0));

  auto found = [&](const Eigen::VectorXd& v) { return v(s_var) > 0.0 && p.strictly_feasible(v.head(n)); };
  const double m = static_cast<double>(aux.constraints.size());
  double t = opt.t_initial;
  for (int outer = 0; outer < 80; ++outer) {
    CenterOutcome out = center(aux, y, t, opt, steps, found);
    if (found(y)) {
      x = y.head(n);
      return true;
    }
    if (out == CenterOutcome::Budget) return false;
    // s* <= s + m/t on the central path
    if (y(s_var) + m / t < 0.0) return false;
    if (m / t < 1e-14 * (1.0 + std::abs(y(s_var)))) return false;
    t *= opt.t_growth;
  }
  return false;
}

} // namespace

BarrierResult solve_barrier(const Program& program, const Eigen::VectorXd& start, const BarrierOptions& options) {
  BarrierResult result;
  result.x = start;
  if (start.size() != program.num_vars()) {
    result.status = SolveStatus::NumericalFailure;
    return result;
  }
  for (const auto& c : program.constraints) {
    if (!c.in_domain(start)) {
      result.status = SolveStatus::NumericalFailure;
      return result;
    }
  }
  Eigen::VectorXd x = start;
  int steps = 0;
  if (!program.strictly_feasible(x)) {
    result.phase_one = true;
    if (!phase_one(program, x, options, steps)) {
      result.newton_steps = steps;
      result.status = steps >= options.max_newton_steps ? SolveStatus::MaxIterations : SolveStatus::Infeasible;
      return result;
    }
  }

  const double m = static_cast<double>(program.constraints.size());
  double t = options.t_initial;
  auto never = [](const Eigen::VectorXd&) { return false; };
  for (;;) {
    CenterOutcome out = center(program, x, t, options, steps, never);
    double gap = m / t;
    result.x = x;
    result.gap = gap;
    result.newton_steps = steps;
    if (out == CenterOutcome::Budget) {
      result.status = SolveStatus::MaxIterations;
      return result;
    }
    if (gap <= options.gap_abs + options.gap_rel * std::abs(program.objective_value(x))) {
      result.status = SolveStatus::Optimal;
      return result;
    }
    if (out == CenterOutcome::Stalled && gap <= 1e-6 * (1.0 + std::abs(program.objective_value(x)))) {
      // roundoff floor reached close to the optimum
      result.status = SolveStatus::Optimal;
      return result;
    }
    if (t > 1e24) {
      result.status = SolveStatus::NumericalFailure;
      return result;
    }
    t *= options.t_growth;
  }
}

} // namespace rmshare::convex
