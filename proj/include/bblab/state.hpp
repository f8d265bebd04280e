#pragma once

#include <optional>

#include "bblab/control.hpp"
#include "bblab/model.hpp"

namespace bblab {

struct SolverOptions {
  double tol_rms = 1e-10;     // residual tolerance, discrete L2 norm / sqrt(n^d)
  int max_newton = 80;
  int max_sweeps = 100000;    // monotone fallback iterations
  int polish_steps = 0;       // extra Newton steps after the tolerance is met
};

// field holds theta (log form) or Theta / y (primary form). Additive models are
// always solved in the primary variable.
struct StateSolution {
  ScalarField field;
  StateForm form = StateForm::theta;
  double residual_norm = 0;
  int iterations = 0;
  bool used_fallback = false;
};

StateSolution solve_state(const ProblemSpec& spec, const Control& m,
                          const std::optional<ScalarField>& init = std::nullopt,
                          const SolverOptions& options = {});

// theta = log Theta; bilinear models only.
Eigen::VectorXd log_state(const StateSolution& s);
// Theta (bilinear) or y (additive).
Eigen::VectorXd primary_state(const StateSolution& s);

// Discrete L2 residual of the state equation in the given form.
double state_residual(const ProblemSpec& spec, const Control& m, const ScalarField& field, StateForm form);

struct ComparisonReport {
  double min_state_gap = 0;  // min(theta_{m2} - theta_m), primary variable for additive models
  double objective_gap = 0;  // J(m2) - J(m)
  bool passed = false;
};

ComparisonReport comparison_check(const ProblemSpec& spec, const Control& m, const Control& m2,
                                  double tol = 1e-8);

}  // namespace bblab
