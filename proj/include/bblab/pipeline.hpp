#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bblab/optimize.hpp"
#include "bblab/report_io.hpp"

namespace bblab {

enum class InitKind { constant, random, smooth };

struct Analyses {
  bool weiss = false;
  bool blowup_match = false;
  bool boundary = false;
  bool density = false;
  bool second_order = false;
  std::vector<double> fragmentation_sweep;  // mu values, strictly decreasing
};

struct AnalysisSettings {
  std::vector<double> validation_range{-10.0, 3.0};
  int validation_samples = 128;
  int second_order_samples = 200;
  double second_order_radius = 0.1;
  std::vector<double> weiss_radii{0.2, 0.14, 0.1, 0.07, 0.05, 0.035, 0.025};
  int weiss_points = 4;        // free-boundary sample points added to the critical set
  int max_critical = 8;        // flattest critical points kept as centers
  double weiss_slack_h = 50;   // slack in units of h
  std::vector<double> blowup_radii{0.16, 0.08, 0.04, 0.02};
  int catalogue_max = 8;
  double density_eps = 0.1;
  double probe_radius_h = 4;
};

struct ExperimentConfig {
  ProblemSpec spec;
  int d = 2;
  int n = 64;
  bool run_optimizer = true;
  OptimizeConfig optimize;
  InitKind init = InitKind::random;
  Analyses analyses;
  AnalysisSettings settings;
  std::string output_dir = "bblab_out";
  std::uint64_t seed = 0;
  int threads = 1;

  void check() const;
};

// Missing keys take the defaults above.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

Control initial_control(const ExperimentConfig& c, const TorusGrid& grid);

struct RunResult {
  Json manifest;
  int exit_code = 0;
};

// Runs the pipeline and writes <output_dir>/manifest.json. Module errors are
// recorded with their stage rather than thrown.
RunResult run(const ExperimentConfig& config);

}  // namespace bblab
