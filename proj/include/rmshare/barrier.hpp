// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rmshare::convex {

/// Separable concave building blocks: coef * phi(x[var]) with coef >= 0.
enum class TermKind {
  Sqrt,  // sqrt(x), x > 0
  Log,   // ln(x), x > 0
  Log1m, // ln(1 - x), x < 1
};

struct Term {
  TermKind kind;
  int var;
  double coef;
};

double term_value(TermKind kind, double x);
bool term_in_domain(TermKind kind, double x);

/// f(x) = constant + sum linear + sum terms; the constraint reads f(x) >= 0.
struct Constraint {
  std::string label;
  double constant = 0.0;
  std::vector<std::pair<int, double>> linear;
  std::vector<Term> terms;

  double value(const Eigen::VectorXd& x) const;
  bool in_domain(const Eigen::VectorXd& x) const;
  /// Gradient into `grad` (overwritten) and diagonal Hessian into `hess_diag` (overwritten).
  void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::VectorXd& hess_diag) const;
};

/// maximize objective^T x  subject to  every constraint >= 0.
struct Program {
  std::vector<std::string> var_names;
  Eigen::VectorXd objective;
  std::vector<Constraint> constraints;

  int num_vars() const { return static_cast<int>(var_names.size()); }
  int add_var(std::string name);
  Constraint& add_constraint(std::string label);

  double objective_value(const Eigen::VectorXd& x) const { return objective.dot(x); }
  /// Smallest constraint value at x (negative means violated); -inf outside a term's domain.
  double min_constraint(const Eigen::VectorXd& x) const;
  bool strictly_feasible(const Eigen::VectorXd& x) const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus status);

struct BarrierOptions {
  double gap_rel = 1e-10;
  double gap_abs = 1e-13;
  double t_growth = 10.0;
  double t_initial = 1.0;
  double newton_tol = 1e-10; // on half the squared Newton decrement
  int max_newton_steps = 4000;
};

struct BarrierResult {
  Eigen::VectorXd x;
  SolveStatus status = SolveStatus::NumericalFailure;
  int newton_steps = 0;
  double gap = 0.0; // bound on optimum - objective(x)
  bool phase_one = false;
};

/// Log-barrier path following. `start` must lie in the domain of every term; when it is not
/// strictly feasible a phase-one problem (maximize the smallest slack) is solved first.
BarrierResult solve_barrier(const Program& program, const Eigen::VectorXd& start, const BarrierOptions& options = {});

} // namespace rmshare::convex
