#pragma once

#include <Eigen/Sparse>

#include "bblab/grid.hpp"
#include "bblab/model.hpp"

namespace bblab::detail {

using SpMat = Eigen::SparseMatrix<double>;

// scale * (-Delta_h) + diag(diag), assembled with the periodic 2d+1-point pattern.
SpMat shifted_laplacian(const TorusGrid& grid, double scale, const Eigen::VectorXd& diag);

// Diagonal part (beyond scale*(-Lap_h)) of the symmetric log-form Jacobian
// S = Theta J Theta^{-1}: mu/h^2 sum_j expm1(theta_j - theta_i) - Q'(theta_i).
Eigen::VectorXd theta_jacobian_diag(const TorusGrid& grid, double mu, const Nonlinearity& nl,
                                    const Eigen::VectorXd& theta);

// Diagonal of the primary-form Jacobian: -(m_i if bilinear) - b'(U_i).
Eigen::VectorXd primary_jacobian_diag(const Nonlinearity& nl, const Eigen::VectorXd& m,
                                      const Eigen::VectorXd& u, bool bilinear);

// Sparse symmetric factorization; the symbolic analysis is reused while the
// pattern (grid) stays the same.
class SymmetricSolver {
 public:
  void factorize(const SpMat& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Index analyzed_size_ = -1;
};

}  // namespace bblab::detail
