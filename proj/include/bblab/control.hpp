#pragma once

#include <optional>

#include "bblab/grid.hpp"

namespace bblab {

// A field with values in [0,1]; optionally carries its target volume fraction.
class Control {
 public:
  explicit Control(ScalarField field, std::optional<double> target_volume = std::nullopt);

  static Control constant(const TorusGrid& grid, double value) {
    return Control(ScalarField(grid, value));
  }

  const ScalarField& field() const { return field_; }
  const Eigen::VectorXd& values() const { return field_.values(); }
  const TorusGrid& grid() const { return field_.grid(); }
  double operator[](Index i) const { return field_[i]; }
  double mean() const { return field_.mean(); }
  std::optional<double> target_volume() const { return target_volume_; }

 private:
  ScalarField field_;
  std::optional<double> target_volume_;
};

inline Control::Control(ScalarField field, std::optional<double> target_volume)
    : field_(std::move(field)), target_volume_(target_volume) {
  if (field_.min() < -1e-12 || field_.max() > 1.0 + 1e-12)
    throw InvalidArgument("control values must lie in [0,1]");
}

}  // namespace bblab
