#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bblab/errors.hpp"

namespace bblab {

using Index = Eigen::Index;
using MultiIndex = std::array<int, 3>;

// Periodic cell-centered grid on [0,1)^d. Flat indices are row-major with
// axis 0 slowest, so ascending flat index is lexicographic order.
class TorusGrid {
 public:
  TorusGrid(int d, int n);

  int dim() const { return d_; }
  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  Index size() const { return size_; }
  double cell_volume() const { return std::pow(h(), d_); }

  MultiIndex unravel(Index flat) const {
    MultiIndex idx{0, 0, 0};
    for (int a = d_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % n_);
      flat /= n_;
    }
    return idx;
  }

  // Wraps each component modulo n.
  Index ravel(const MultiIndex& idx) const {
    Index flat = 0;
    for (int a = 0; a < d_; ++a) flat = flat * n_ + wrap(idx[a]);
    return flat;
  }

  Index neighbor(Index flat, int axis, int step) const {
    const Index stride = stride_[axis];
    const int i = static_cast<int>((flat / stride) % n_);
    return flat + (wrap(i + step) - i) * stride;
  }

  Index stride(int axis) const { return stride_[axis]; }

  Eigen::VectorXd center(Index flat) const {
    const MultiIndex idx = unravel(flat);
    Eigen::VectorXd x(d_);
    for (int a = 0; a < d_; ++a) x[a] = (idx[a] + 0.5) * h();
    return x;
  }

  int wrap(int i) const {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  bool operator==(const TorusGrid& o) const { return d_ == o.d_ && n_ == o.n_; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

 private:
  int d_;
  int n_;
  Index size_;
  std::array<Index, 3> stride_{0, 0, 0};
};

template <typename Scalar>
class BasicField {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicField(const TorusGrid& grid, Scalar fill = Scalar(0))
      : grid_(grid), values_(Vector::Constant(grid.size(), fill)) {
    check();
  }

  BasicField(const TorusGrid& grid, Vector values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidArgument("field length does not match grid size");
    check();
  }

  const TorusGrid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Scalar operator[](Index i) const { return values_[i]; }
  Index size() const { return values_.size(); }

  Scalar min() const { return values_.minCoeff(); }
  Scalar max() const { return values_.maxCoeff(); }
  Scalar mean() const { return values_.mean(); }

 private:
  void check() const {
    if (!values_.allFinite()) throw InvalidArgument("field contains non-finite values");
  }

  TorusGrid grid_;
  Vector values_;
};

using ScalarField = BasicField<double>;

// Samples fn(x) at every cell center.
template <typename Fn>
ScalarField sample(const TorusGrid& grid, Fn&& fn) {
  Eigen::VectorXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = fn(grid.center(i));
  return ScalarField(grid, std::move(v));
}

// Discrete Laplacian Delta_h (negative semidefinite), 2d+1-point periodic stencil.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_laplacian(
    const TorusGrid& grid, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  const Scalar inv_h2 = Scalar(grid.n()) * Scalar(grid.n());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    Scalar acc = Scalar(-2 * grid.dim()) * u[i];
    for (int a = 0; a < grid.dim(); ++a)
      acc += u[grid.neighbor(i, a, 1)] + u[grid.neighbor(i, a, -1)];
    out[i] = acc * inv_h2;
  }
  return out;
}

template <typename Scalar>
BasicField<Scalar> laplacian(const BasicField<Scalar>& f) {
  return BasicField<Scalar>(f.grid(), apply_laplacian(f.grid(), f.values()));
}

// (shift f)(x) = f(x - v h).
template <typename Scalar>
BasicField<Scalar> shift(const BasicField<Scalar>& f, const MultiIndex& v) {
  const TorusGrid& g = f.grid();
  typename BasicField<Scalar>::Vector out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    MultiIndex idx = g.unravel(i);
    for (int a = 0; a < g.dim(); ++a) idx[a] -= v[a];
    out[i] = f[g.ravel(idx)];
  }
  return BasicField<Scalar>(g, std::move(out));
}

// <a,b> = h^d sum a b
template <typename Scalar>
Scalar inner_product(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  if (a.grid() != b.grid()) throw InvalidArgument("fields live on different grids");
  return Scalar(a.grid().cell_volume()) * a.values().dot(b.values());
}

template <typename Scalar>
Scalar rms(const BasicField<Scalar>& a) {
  using std::sqrt;
  return sqrt(a.values().squaredNorm() / Scalar(a.size()));
}

struct SobolevNorm {
  double order = 0;
  double value = 0;
};

// Discrete Fourier coefficients normalized so that sum |c_k|^2 = mean square.
Eigen::VectorXcd fourier_coefficients(const ScalarField& f);

// Integer wavenumber of FFT index j on an n-point axis (centered lattice).
inline int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

// ||f||_{W^{-s,2}} with multiplier (1 + 4 pi^2 |k|^2)^{-s}; s in {1, 2}.
SobolevNorm neg_sobolev_norm(const ScalarField& f, double s);

// Shortest periodic displacement from a to b on the unit torus, componentwise.
Eigen::VectorXd torus_delta(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

ScalarField ball_indicator(const TorusGrid& grid, const Eigen::VectorXd& x0, double r);

struct NormRatio {
  double r = 0;
  double ratio = 0;
};

// W^{-2,2}/W^{-1,2} ratio of ball indicators around x0.
std::vector<NormRatio> norm_ratio_decay(const TorusGrid& grid, const Eigen::VectorXd& x0,
                                        const std::vector<double>& radii);

}  // namespace bblab
