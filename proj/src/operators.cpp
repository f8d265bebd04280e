#include "bblab/detail/operators.hpp"

#include <cmath>
#include <vector>

namespace bblab::detail {

SpMat shifted_laplacian(const TorusGrid& grid, double scale, const Eigen::VectorXd& diag) {
  const double off = -scale * grid.n() * grid.n();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(grid.size()) * (2 * grid.dim() + 1));
  for (Index i = 0; i < grid.size(); ++i) {
    t.emplace_back(i, i, diag[i] - 2 * grid.dim() * off);
    for (int a = 0; a < grid.dim(); ++a) {
      t.emplace_back(i, grid.neighbor(i, a, 1), off);
      t.emplace_back(i, grid.neighbor(i, a, -1), off);
    }
  }
  SpMat m(grid.size(), grid.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd theta_jacobian_diag(const TorusGrid& grid, double mu, const Nonlinearity& nl,
                                    const Eigen::VectorXd& t) {
  const double coef = mu * grid.n() * grid.n();
  Eigen::VectorXd d(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    double s = 0;
    for (int a = 0; a < grid.dim(); ++a)
      s += std::expm1(t[grid.neighbor(i, a, 1)] - t[i]) + std::expm1(t[grid.neighbor(i, a, -1)] - t[i]);
    d[i] = coef * s - nl.dq(t[i]);
  }
  return d;
}

Eigen::VectorXd primary_jacobian_diag(const Nonlinearity& nl, const Eigen::VectorXd& m,
                                      const Eigen::VectorXd& u, bool bilinear) {
  Eigen::VectorXd d(u.size());
  for (Index i = 0; i < u.size(); ++i) d[i] = -(bilinear ? m[i] : 0.0) - nl.db(u[i]);
  return d;
}

void SymmetricSolver::factorize(const SpMat& a) {
  if (analyzed_size_ != a.rows()) {
    ldlt_.analyzePattern(a);
    analyzed_size_ = a.rows();
  }
  ldlt_.factorize(a);
  if (ldlt_.info() != Eigen::Success) throw SingularSystem("sparse factorization failed");
}

Eigen::VectorXd SymmetricSolver::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = ldlt_.solve(b);
  if (ldlt_.info() != Eigen::Success || !x.allFinite()) throw SingularSystem("sparse solve failed");
  return x;
}

}  // namespace bblab::detail
