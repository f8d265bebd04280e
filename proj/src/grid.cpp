#include "bblab/grid.hpp"

#include <unsupported/Eigen/FFT>

namespace bblab {

TorusGrid::TorusGrid(int d, int n) : d_(d), n_(n) {
  if (d < 1 || d > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3");
  if (n < 8) throw InvalidArgument("grid needs at least 8 cells per axis");
  size_ = 1;
  for (int a = 0; a < d; ++a) size_ *= n;
  Index s = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= n;
  }
}

Eigen::VectorXcd fourier_coefficients(const ScalarField& f) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  Eigen::VectorXcd data = f.values().cast<std::complex<double>>();
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(n), out(n);
  for (int a = 0; a < g.dim(); ++a) {
    const Index stride = g.stride(a);
    for (Index base = 0; base < g.size(); ++base) {
      // Visit each line once: its base has axis-a coordinate zero.
      if ((base / stride) % n != 0) continue;
      for (int j = 0; j < n; ++j) line[j] = data[base + j * stride];
      fft.fwd(out, line);
      for (int j = 0; j < n; ++j) data[base + j * stride] = out[j];
    }
  }
  data /= static_cast<double>(g.size());
  return data;
}

SobolevNorm neg_sobolev_norm(const ScalarField& f, double s) {
  if (s != 1.0 && s != 2.0) throw InvalidArgument("only W^{-1,2} and W^{-2,2} are supported");
  const TorusGrid& g = f.grid();
  const Eigen::VectorXcd c = fourier_coefficients(f);
  const double four_pi2 = 4.0 * M_PI * M_PI;
  double acc = 0;
  for (Index i = 0; i < g.size(); ++i) {
    const MultiIndex idx = g.unravel(i);
    double k2 = 0;
    for (int a = 0; a < g.dim(); ++a) {
      const double k = wavenumber(idx[a], g.n());
      k2 += k * k;
    }
    acc += std::norm(c[i]) * std::pow(1.0 + four_pi2 * k2, -s);
  }
  return {s, std::sqrt(acc)};
}

Eigen::VectorXd torus_delta(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd d = b - a;
  for (Index i = 0; i < d.size(); ++i) d[i] -= std::round(d[i]);
  return d;
}

ScalarField ball_indicator(const TorusGrid& grid, const Eigen::VectorXd& x0, double r) {
  return sample(grid, [&](const Eigen::VectorXd& x) {
    return torus_delta(x0, x).squaredNorm() < r * r ? 1.0 : 0.0;
  });
}

std::vector<NormRatio> norm_ratio_decay(const TorusGrid& grid, const Eigen::VectorXd& x0,
                                        const std::vector<double>& radii) {
  if (x0.size() != grid.dim()) throw InvalidArgument("point dimension mismatch");
  std::vector<NormRatio> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (r < 3.0 * grid.h()) throw UnresolvedRadius("ball radius below 3h");
    if (r >= 0.5) throw InvalidArgument("ball radius must be below 1/2");
    const ScalarField ind = ball_indicator(grid, x0, r);
    const double w1 = neg_sobolev_norm(ind, 1).value;
    const double w2 = neg_sobolev_norm(ind, 2).value;
    out.push_back({r, w2 / w1});
  }
  return out;
}

}  // namespace bblab
