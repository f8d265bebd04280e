#include "bblab/planar.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace bblab {

PlanarField::PlanarField(Eigen::MatrixXd v, double h, Eigen::Vector2d origin, bool periodic)
    : v_(std::move(v)), h_(h), origin_(origin), periodic_(periodic) {
  const Index nx = v_.rows(), ny = v_.cols();
  if (nx < 5 || ny < 5) throw InvalidArgument("planar field needs at least 5x5 samples");
  gx_.resize(nx, ny);
  gy_.resize(nx, ny);
  lap_.resize(nx, ny);
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < ny; ++j) {
      if (periodic_) {
        const Index ip = (i + 1) % nx, im = (i + nx - 1) % nx, jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
        gx_(i, j) = (v_(ip, j) - v_(im, j)) / (2 * h_);
        gy_(i, j) = (v_(i, jp) - v_(i, jm)) / (2 * h_);
        lap_(i, j) = (v_(ip, j) + v_(im, j) + v_(i, jp) + v_(i, jm) - 4 * v_(i, j)) / (h_ * h_);
        continue;
      }
      const Index ip = std::min(i + 1, nx - 1), im = std::max<Index>(i - 1, 0);
      const Index jp = std::min(j + 1, ny - 1), jm = std::max<Index>(j - 1, 0);
      gx_(i, j) = (v_(ip, j) - v_(im, j)) / ((ip - im) * h_);
      gy_(i, j) = (v_(i, jp) - v_(i, jm)) / ((jp - jm) * h_);
      // Edge rows reuse the nearest interior stencil.
      const Index ic = std::clamp<Index>(i, 1, nx - 2), jc = std::clamp<Index>(j, 1, ny - 2);
      lap_(i, j) = (v_(ic + 1, jc) + v_(ic - 1, jc) + v_(ic, jc + 1) + v_(ic, jc - 1) - 4 * v_(ic, jc)) / (h_ * h_);
    }
}

PlanarField PlanarField::periodic(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  if (g.dim() != 2) throw InvalidArgument("planar sampler needs a two-dimensional field");
  Eigen::MatrixXd v(g.n(), g.n());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) v(i, j) = f[Index(i) * g.n() + j];
  return PlanarField(std::move(v), g.h(), Eigen::Vector2d::Constant(0.5 * g.h()), true);
}

PlanarField PlanarField::patch(Eigen::MatrixXd values, double h, const Eigen::Vector2d& origin) {
  return PlanarField(std::move(values), h, origin, false);
}

namespace {

// Catmull-Rom weights for nodes -1, 0, 1, 2 at offset t in [0, 1]; exact on quadratics.
std::array<double, 4> cubic_weights(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t), 0.5 * (t3 - t2)};
}

}  // namespace

double PlanarField::interp(const Eigen::MatrixXd& a, const Eigen::Vector2d& x) const {
  const Index nx = a.rows(), ny = a.cols();
  double u = (x[0] - origin_[0]) / h_, w = (x[1] - origin_[1]) / h_;
  if (periodic_) {
    u = std::fmod(u, double(nx));
    if (u < 0) u += nx;
    w = std::fmod(w, double(ny));
    if (w < 0) w += ny;
  } else {
    u = std::clamp(u, 0.0, double(nx - 1));
    w = std::clamp(w, 0.0, double(ny - 1));
  }
  Index i = std::min(static_cast<Index>(std::floor(u)), nx - (periodic_ ? 1 : 2));
  Index j = std::min(static_cast<Index>(std::floor(w)), ny - (periodic_ ? 1 : 2));
  const auto wu = cubic_weights(u - i), ww = cubic_weights(w - j);
  auto at = [&](Index p, Index q) {
    if (periodic_) return a(((p % nx) + nx) % nx, ((q % ny) + ny) % ny);
    return a(std::clamp<Index>(p, 0, nx - 1), std::clamp<Index>(q, 0, ny - 1));
  };
  double acc = 0;
  for (int s = 0; s < 4; ++s) {
    double row = 0;
    for (int t = 0; t < 4; ++t) row += ww[t] * at(i - 1 + s, j - 1 + t);
    acc += wu[s] * row;
  }
  return acc;
}

bool PlanarField::contains_disk(const Eigen::Vector2d& c, double r) const {
  if (periodic_) return 2 * r < std::min(v_.rows(), v_.cols()) * h_;
  const Eigen::Vector2d lo = origin_ + Eigen::Vector2d::Constant(2 * h_);
  const Eigen::Vector2d hi = origin_ + Eigen::Vector2d(v_.rows() - 3, v_.cols() - 3) * h_;
  return c[0] - r >= lo[0] && c[1] - r >= lo[1] && c[0] + r <= hi[0] && c[1] + r <= hi[1];
}

PlanarField PlanarField::shifted(double c) const {
  return PlanarField((v_.array() - c).matrix(), h_, origin_, periodic_);
}

PlanarField PlanarField::negated() const { return PlanarField(-v_, h_, origin_, periodic_); }

}  // namespace bblab
