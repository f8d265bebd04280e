#pragma once

#include <vector>

#include "bblab/control.hpp"

namespace bblab {

class DiscreteSet {
 public:
  DiscreteSet(const TorusGrid& grid, std::vector<char> mask);
  // Cells with value > threshold.
  static DiscreteSet from_field(const ScalarField& f, double threshold = 0.5);
  static DiscreteSet from_control(const Control& m) { return from_field(m.field()); }

  const TorusGrid& grid() const { return grid_; }
  bool operator[](Index i) const { return mask_[i] != 0; }
  const std::vector<char>& mask() const { return mask_; }
  Index count() const;
  DiscreteSet complement() const;
  ScalarField as_field() const;
  bool operator==(const DiscreteSet& o) const { return grid_ == o.grid_ && mask_ == o.mask_; }

 private:
  TorusGrid grid_;
  std::vector<char> mask_;
};

// Fraction of cell centers of E within the open ball B(x; r) over all centers inside.
double density(const DiscreteSet& E, const Eigen::VectorXd& x, double r);

// Same over the axis-aligned cube of side s centered at x.
double square_density(const DiscreteSet& E, const Eigen::VectorXd& x, double side);

struct DensityScale {
  double side = 0;
  double density = 0;
  Eigen::VectorXd center;
};

struct IntermediateDensityResult {
  Eigen::VectorXd point;
  std::vector<DensityScale> trace;  // one square per visited scale, coarse to fine
};

// Nested-square construction of a point whose cube densities stay near 1/2 down to
// side 8h.
IntermediateDensityResult find_intermediate_density_point(const DiscreteSet& E, const Eigen::VectorXd& x0,
                                                          double eps);

// Cells whose probe ball meets both phases.
DiscreteSet essential_boundary(const DiscreteSet& E, double r_probe);

// h^{d-1} times the number of faces separating the phases.
double perimeter(const DiscreteSet& E);

struct Curve {
  std::vector<Eigen::Vector2d> vertices;  // unwrapped; back() = front() + winding
  Eigen::Vector2i winding = Eigen::Vector2i::Zero();
  double length = 0;
  double min_gradient = 0;
  int orientation = 0;  // sign of d eta / d nu on the enclosed region's outward normal; 0 if wrapping
  bool near_critical = false;

  bool wraps() const { return winding != Eigen::Vector2i::Zero(); }
};

struct CurveSet {
  std::vector<Curve> curves;
  double level = 0;
  double eps2 = 0;  // near-critical threshold on min |grad eta|
};

// Marching squares on the cell-center lattice; saddles by the square's average.
CurveSet trace_level_curves(const ScalarField& eta, double level, double eps2 = -1);

// Trapezoid rule of 1/|grad eta| along the polyline.
double weighted_curve_integral(const ScalarField& eta, const Curve& curve);

struct StabilityOptions {
  double margin = 0.125;  // per side, around the curve's bounding box
  int max_cells = 64;     // per axis
  bool penalized = false; // adds int v^2 and drops the mean constraint
};

// min over v with int_G v/|grad eta| = 0 of int |grad v|^2 / int_G v^2/|grad eta|.
double stability_eigenvalue(const ScalarField& eta, const Curve& curve, const StabilityOptions& options = {});

// ||1_ball - 1_annulus||^2_{W^{-1,2}} with both sets of volume fraction D inside B(x0; r).
double ball_annulus_gap(const TorusGrid& grid, const Eigen::VectorXd& x0, double r, double D);

}  // namespace bblab
