#pragma once

#include <Eigen/Dense>

#include "bblab/grid.hpp"

namespace bblab {

// Bicubic (Catmull-Rom) sampler over a uniform planar cell-centered grid, either a
// periodic torus field (d = 2) or a finite patch. Gradients and Laplacians are
// centered differences interpolated the same way (one-sided at patch edges).
class PlanarField {
 public:
  static PlanarField periodic(const ScalarField& field);
  // values(i, j) sits at origin + (i h, j h).
  static PlanarField patch(Eigen::MatrixXd values, double h, const Eigen::Vector2d& origin);
  // Samples fn on an n x n patch of [center - half, center + half]^2 (cell centers).
  template <typename Fn>
  static PlanarField sampled(Fn&& fn, const Eigen::Vector2d& center, double half, int n) {
    const double h = 2 * half / n;
    const Eigen::Vector2d origin = center - Eigen::Vector2d::Constant(half - 0.5 * h);
    Eigen::MatrixXd v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = fn(Eigen::Vector2d(origin[0] + i * h, origin[1] + j * h));
    return patch(std::move(v), h, origin);
  }

  double spacing() const { return h_; }
  bool is_periodic() const { return periodic_; }
  const Eigen::MatrixXd& values() const { return v_; }
  const Eigen::Vector2d& origin() const { return origin_; }

  double value(const Eigen::Vector2d& x) const { return interp(v_, x); }
  Eigen::Vector2d gradient(const Eigen::Vector2d& x) const { return {interp(gx_, x), interp(gy_, x)}; }
  double laplacian(const Eigen::Vector2d& x) const { return interp(lap_, x); }

  // True when interpolation stencils around every point of the closed disk stay inside.
  bool contains_disk(const Eigen::Vector2d& c, double r) const;

  PlanarField shifted(double c) const;    // values - c
  PlanarField negated() const;

 private:
  PlanarField(Eigen::MatrixXd v, double h, Eigen::Vector2d origin, bool periodic);
  double interp(const Eigen::MatrixXd& a, const Eigen::Vector2d& x) const;

  Eigen::MatrixXd v_, gx_, gy_, lap_;
  double h_;
  Eigen::Vector2d origin_;
  bool periodic_;
};

}  // namespace bblab
