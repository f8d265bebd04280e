#pragma once

#include <optional>
#include <vector>

#include "bblab/state.hpp"

namespace bblab {

struct SwitchField {
  ScalarField eta;
  double min_value = 0;
  std::optional<double> threshold_shift;  // c in penalized mode; for bang-bang constrained controls the phase-separating level
  double relative_residual = 0;  // of the nonsymmetric adjoint system

  // eta - shift, the free-boundary unknown.
  ScalarField shifted() const;
};

// Solves the discrete adjoint (switch) equation L eta = dj/dtheta, L the transpose
// of the log-form state Jacobian.
SwitchField solve_switch(const ProblemSpec& spec, const Control& m, const StateSolution& state);

// h^d sum j(x_i, theta_i).
double state_objective(const ProblemSpec& spec, const Control& m, const StateSolution& state);
// state_objective minus c h^d sum m in penalized mode.
double objective(const ProblemSpec& spec, const Control& m, const StateSolution& state);

// theta-dot (log variable) for bilinear models, y-dot for additive ones.
ScalarField linearized_state(const ProblemSpec& spec, const Control& m, const StateSolution& state,
                             const ScalarField& h);

// Second-order state response (theta-ddot / y-ddot) along h.
ScalarField second_order_state(const ProblemSpec& spec, const Control& m, const StateSolution& state,
                               const ScalarField& h);

// Symmetric bilinear form of the second derivative of J, built from the adjoint:
// h^d sum [eta mu/h^2 sum_j e^{theta_j-theta_i} da db + W a b], a, b the linearized
// states and W = Q'' eta + j''.
double hessian_form(const ProblemSpec& spec, const Control& m, const StateSolution& state,
                    const SwitchField& eta, const ScalarField& h1, const ScalarField& h2);

struct DerivativeEntry {
  double t = 0;
  double fd_value = 0;
  double analytic = 0;
  double rel_err = 0;
};

struct DerivativeReport {
  ScalarField direction;
  double first_analytic = 0;           // int (eta - c) h
  std::vector<DerivativeEntry> first_order;
  double second_analytic = 0;          // hessian_form(h, h)
  double second_via_state = 0;         // sum j'' thetadot^2 + j' thetaddot
  std::vector<DerivativeEntry> second_order;
  std::vector<double> steps;
  double observed_order = 0;           // least-squares slope of log first-order error vs log t
};

DerivativeReport derivative_check(const ProblemSpec& spec, const Control& m, const ScalarField& h,
                                  const std::vector<double>& steps, bool second_order = true);

// Smallest eigenvalue of the linearized operator, by inverse iteration on its
// symmetric similarity transform.
double principal_eigenvalue(const ProblemSpec& spec, const Control& m, const StateSolution& state,
                            double tol = 1e-8, int max_iter = 5000);

struct CoefficientPair {
  ScalarField f;
  ScalarField g;
  double min_sum = 0;
  double residual_rms = 0;  // || -Lap_h eta - (f m - g (1-m)) ||_RMS
};

// Free-boundary coefficients with -Lap_h eta = f m - g (1 - m) and f + g = 2 eta / mu.
CoefficientPair compute_fg(const ProblemSpec& spec, const Control& m, const StateSolution& state,
                           const SwitchField& eta);

}  // namespace bblab
