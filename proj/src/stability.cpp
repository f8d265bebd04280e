#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "bblab/detail/operators.hpp"
#include "bblab/geometry.hpp"
#include "bblab/planar.hpp"

namespace bblab {

double stability_eigenvalue(const ScalarField& eta, const Curve& curve, const StabilityOptions& options) {
  using detail::SpMat;
  const TorusGrid& g = eta.grid();
  if (g.dim() != 2) throw InvalidArgument("stability eigenvalue needs a two-dimensional field");
  const size_t p = curve.vertices.size() - 1;
  if (p < 3) throw DegenerateInput("curve has too few vertices");
  if (options.max_cells < 8) throw InvalidArgument("patch needs at least 8 cells per axis");

  // Patch geometry: periodic closure of the margin box, or the full torus axis.
  std::array<double, 2> start{}, width{}, hp{};
  std::array<int, 2> np{};
  for (int a = 0; a < 2; ++a) {
    double lo = curve.vertices[0][a], hi = lo;
    for (const auto& v : curve.vertices) lo = std::min(lo, v[a]), hi = std::max(hi, v[a]);
    width[a] = hi - lo + 2 * options.margin;
    start[a] = lo - options.margin;
    if (curve.winding[a] != 0 || width[a] >= 1.0) width[a] = 1.0, start[a] = 0.0;
    np[a] = std::clamp(static_cast<int>(std::lround(width[a] / g.h())), 8, options.max_cells);
    hp[a] = width[a] / np[a];
  }
  const int nx = np[0], ny = np[1];
  const Index K = Index(nx) * ny;
  auto id = [&](int i, int j) { return Index((i % nx + nx) % nx) * ny + (j % ny + ny) % ny; };

  std::vector<Eigen::Triplet<double>> trip;
  const double wx = hp[1] / hp[0], wy = hp[0] / hp[1];
  auto face = [&](Index u, Index v, double w) {
    trip.emplace_back(u, u, w);
    trip.emplace_back(v, v, w);
    trip.emplace_back(u, v, -w);
    trip.emplace_back(v, u, -w);
  };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      face(id(i, j), id(i + 1, j), wx);
      face(id(i, j), id(i, j + 1), wy);
    }

  // Curve quadrature weights and bilinear restriction rows.
  const PlanarField pf = PlanarField::periodic(eta);
  Eigen::VectorXd omega(p);
  std::vector<std::array<std::pair<Index, double>, 4>> rows(p);
  for (size_t k = 0; k < p; ++k) {
    const Eigen::Vector2d& x = curve.vertices[k];
    const Eigen::Vector2d& xp = curve.vertices[k + 1];
    const Eigen::Vector2d& xm = k == 0 ? curve.vertices[p - 1] : curve.vertices[k - 1];
    const double grad = pf.gradient(x).norm();
    if (grad < 1e-14) throw DegenerateGradient("vanishing gradient on the curve");
    omega[k] = 0.5 * ((xp - x).norm() + (x - xm).norm()) / grad;
    double u = (x[0] - start[0]) / hp[0] - 0.5, w = (x[1] - start[1]) / hp[1] - 0.5;
    const int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(w));
    const double tu = u - i, tw = w - j;
    rows[k] = {{{id(i, j), (1 - tu) * (1 - tw)},
                {id(i + 1, j), tu * (1 - tw)},
                {id(i, j + 1), (1 - tu) * tw},
                {id(i + 1, j + 1), tu * tw}}};
  }

  Eigen::MatrixXd T(p, p);
  Eigen::MatrixXd X(K, p);
  Eigen::VectorXd rhs;
  if (options.penalized) {
    for (Index q = 0; q < K; ++q) trip.emplace_back(q, q, hp[0] * hp[1]);
    SpMat A(K, K);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> solver(A);
    if (solver.info() != Eigen::Success) throw SingularSystem("patch operator factorization failed");
    for (size_t k = 0; k < p; ++k) {
      rhs = Eigen::VectorXd::Zero(K);
      for (const auto& [q, b] : rows[k]) rhs[q] += std::sqrt(omega[k]) * b;
      X.col(k) = solver.solve(rhs);
    }
  } else {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(K);
    for (size_t k = 0; k < p; ++k)
      for (const auto& [q, b] : rows[k]) c[q] += omega[k] * b;
    c /= c.norm();
    for (Index q = 0; q < K; ++q)
      if (c[q] != 0) {
        trip.emplace_back(q, K, c[q]);
        trip.emplace_back(K, q, c[q]);
      }
    SpMat S(K + 1, K + 1);
    S.setFromTriplets(trip.begin(), trip.end());
    S.makeCompressed();
    Eigen::SparseLU<SpMat> solver;
    solver.compute(S);
    if (solver.info() != Eigen::Success) throw SingularSystem("constrained patch system is singular");
    for (size_t k = 0; k < p; ++k) {
      rhs = Eigen::VectorXd::Zero(K + 1);
      for (const auto& [q, b] : rows[k]) rhs[q] += std::sqrt(omega[k]) * b;
      X.col(k) = solver.solve(rhs).head(K);
    }
  }
  if (!X.allFinite()) throw SingularSystem("patch solve produced non-finite values");
  for (size_t k = 0; k < p; ++k) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
    for (size_t l = 0; l < p; ++l) {
      double acc = 0;
      for (const auto& [q, b] : rows[l]) acc += b * X(q, k);
      r[l] = std::sqrt(omega[l]) * acc;
    }
    T.col(k) = r;
  }
  const Eigen::MatrixXd Ts = 0.5 * (T + T.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ts, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0)) throw DegenerateInput("curve carries no admissible perturbation");
  return 1.0 / top;
}

}  // namespace bblab
