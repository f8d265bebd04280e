#pragma once

#include <string>
#include <vector>

#include "bblab/grid.hpp"

namespace bblab {

enum class StateForm { theta, big_theta };

// bilinear: -mu Lap U = m U + B(U); additive: -mu Lap y = y(1-y) + m.
enum class Coupling { bilinear, additive };

enum class NonlinearityKind { logistic, shifted_logistic, linear_interaction };

enum class ObjectiveKind { population, weighted_population, negative_population, negative_theta, constant };

struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::logistic;
  double rate = 1.0;

  Coupling coupling() const {
    return kind == NonlinearityKind::linear_interaction ? Coupling::additive : Coupling::bilinear;
  }

  // Log-variable reaction Q(u) with B(U) = U Q(ln U). Bilinear models only.
  double q(double u) const;
  double dq(double u) const;
  double d2q(double u) const;

  // Reaction in the primary variable: B(U) for bilinear, y(1-y) for additive.
  double b(double U) const;
  double db(double U) const;
  double d2b(double U) const;
};

struct Objective {
  ObjectiveKind kind = ObjectiveKind::population;
  double amplitude = 0.5;  // weighted_population: w = 1 + amplitude cos(2 pi x_1)

  Eigen::VectorXd weights(const TorusGrid& grid) const;

  // Integrand j(x, theta) in the log variable (w is the cell weight).
  double j(double w, double theta) const;
  double dj(double w, double theta) const;
  double d2j(double w, double theta) const;

  // Integrand psi(x, U) in the primary variable.
  double psi(double w, double U) const;
  double dpsi(double w, double U) const;
  double d2psi(double w, double U) const;
};

struct Mode {
  enum class Kind { constrained, penalized };
  Kind kind = Kind::constrained;
  double value = 0.3;  // m0 or c

  static Mode constrained(double m0) { return {Kind::constrained, m0}; }
  static Mode penalized(double c) { return {Kind::penalized, c}; }
  bool is_constrained() const { return kind == Kind::constrained; }
  double penalty() const { return kind == Kind::penalized ? value : 0.0; }
};

struct ProblemSpec {
  StateForm form = StateForm::theta;
  Nonlinearity nonlinearity;
  Objective objective;
  double mu = 1.0;
  Mode mode;

  bool bilinear() const { return nonlinearity.coupling() == Coupling::bilinear; }
  // Throws InvalidArgument when mu or the mode parameter is out of range.
  void check() const;
};

std::string to_string(StateForm f);
std::string to_string(NonlinearityKind k);
std::string to_string(ObjectiveKind k);
std::string to_string(Mode::Kind k);
StateForm parse_state_form(const std::string& s);
NonlinearityKind parse_nonlinearity(const std::string& s);
ObjectiveKind parse_objective(const std::string& s);
Mode::Kind parse_mode_kind(const std::string& s);

struct ClauseResult {
  std::string name;
  bool passed = true;
  double worst_value = 0;
  double worst_u = 0;
  Index worst_cell = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ClauseResult> clauses;
  double u_min = 0;
  double u_max = 0;
  bool passed() const;
};

// Samples the structural assumptions over u_grid (log variable) and the cells of x_grid.
ValidationReport validate_spec(const ProblemSpec& spec, const std::vector<double>& u_grid,
                               const TorusGrid& x_grid);

std::vector<double> linspace(double a, double b, int count);

}  // namespace bblab
