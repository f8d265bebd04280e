#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bblab/adjoint.hpp"

namespace bblab {

enum class Scheme { thresholding, projected_gradient };
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct OptimizeConfig {
  Scheme scheme = Scheme::thresholding;
  int max_iter = 200;
  double fixed_point_tol = 1e-12;  // fraction of cells allowed to flip at convergence
  double gradient_step = 1.0;      // initial projected-gradient step
  double gradient_tol = 1e-9;      // projected gradient stops when max |P(m + step grad) - m| or the accepted move falls below
  double bang_bang_tol = 1e-6;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

enum class OptimizeStatus { converged, max_iter, cycle_detected };
std::string to_string(OptimizeStatus s);

struct OptimizationReport {
  Control final_control;
  std::vector<double> objective_trace;
  std::vector<double> threshold_trace;
  std::vector<double> flip_trace;
  double bang_bang_fraction = 0;
  double fixed_point_residual = 0;
  bool converged = false;
  bool monotone = true;
  OptimizeStatus status = OptimizeStatus::max_iter;
  int iterations = 0;
  double final_threshold = 0;
};

struct ThresholdResult {
  Control control;
  double level = 0;  // c_k
};

// Constrained: the round(m0 n^d) cells with largest eta (ties by ascending flat
// index); penalized: {eta > c}.
ThresholdResult threshold_step(const SwitchField& eta, const Mode& mode);

OptimizationReport run_thresholding(const ProblemSpec& spec, const OptimizeConfig& config, const Control& m_init);
OptimizationReport run_projected_gradient(const ProblemSpec& spec, const OptimizeConfig& config,
                                          const Control& m_init);
OptimizationReport run_optimizer(const ProblemSpec& spec, const OptimizeConfig& config, const Control& m_init);

// Cellwise clip to [0,1]; in constrained mode followed by a scalar shift found by
// bisection so the clipped mean equals m0.
Control project_admissible(const Eigen::VectorXd& v, const TorusGrid& grid, const Mode& mode);

double certify_bang_bang(const Control& m, double tol);

// Snaps values within tol of 0 or 1 onto them.
Control round_control(const Control& m, double tol);

// Volume fraction round(m0 n^d) with random cell selection.
Control random_bang_bang(const TorusGrid& grid, double m0, std::uint64_t seed);

struct SecondOrderReport {
  std::vector<double> rho;
  std::vector<double> radius;
  double min_rho = 0;
  double mean_rho = 0;
};

SecondOrderReport second_order_check(const ProblemSpec& spec, const Control& m_star, const SwitchField& eta,
                                     int samples, double r0, std::uint64_t seed);

}  // namespace bblab
