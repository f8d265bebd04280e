#include "bblab/state.hpp"

#include <algorithm>
#include <cmath>

#include "bblab/adjoint.hpp"
#include "bblab/detail/operators.hpp"

namespace bblab {
namespace {

using detail::SymmetricSolver;

struct Problem {
  const TorusGrid& grid;
  const Nonlinearity& nl;
  const Eigen::VectorXd& m;
  double mu;
  bool bilinear;

  double coef() const { return mu * grid.n() * grid.n(); }  // mu / h^2
  double tol(const SolverOptions& o) const { return o.tol_rms * std::sqrt(double(grid.size())); }
};

// F_i = -mu/h^2 sum_j expm1(theta_j - theta_i) - m_i - Q(theta_i): the log of the
// discrete primary equation divided by Theta_i.
Eigen::VectorXd theta_residual(const Problem& p, const Eigen::VectorXd& t) {
  const TorusGrid& g = p.grid;
  Eigen::VectorXd f(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    double s = 0;
    for (int a = 0; a < g.dim(); ++a)
      s += std::expm1(t[g.neighbor(i, a, 1)] - t[i]) + std::expm1(t[g.neighbor(i, a, -1)] - t[i]);
    f[i] = -p.coef() * s - p.m[i] - p.nl.q(t[i]);
  }
  return f;
}

// G_i = -mu Lap_h U - (m U or m) - b(U).
Eigen::VectorXd primary_residual(const Problem& p, const Eigen::VectorXd& u) {
  Eigen::VectorXd f = -p.mu * apply_laplacian(p.grid, u);
  for (Index i = 0; i < u.size(); ++i) f[i] -= (p.bilinear ? p.m[i] * u[i] : p.m[i]) + p.nl.b(u[i]);
  return f;
}

struct NewtonResult {
  Eigen::VectorXd x;
  double residual;
  int iterations;
  bool converged;
};

// Damped Newton with Armijo backtracking on the residual norm.
template <typename Residual, typename Step, typename Admissible>
NewtonResult newton(Eigen::VectorXd x, double tol, const SolverOptions& o, Residual&& residual,
                    Step&& step, Admissible&& admissible) {
  const double floor = std::ldexp(1.0, -20);
  Eigen::VectorXd f = residual(x);
  double r = f.norm();
  int polish = 0;
  for (int it = 0; it < o.max_newton; ++it) {
    if (r <= tol) {
      if (polish >= o.polish_steps) return {x, r, it, true};
      ++polish;
    }
    Eigen::VectorXd dx;
    try {
      dx = step(x, f);
    } catch (const SingularSystem&) {
      return {x, r, it, false};
    }
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= floor) {
      Eigen::VectorXd xt = x + lambda * dx;
      if (admissible(xt)) {
        Eigen::VectorXd ft = residual(xt);
        const double rt = ft.norm();
        if (std::isfinite(rt) && (rt <= (1.0 - 1e-4 * lambda) * r || (r <= tol && rt <= 10 * r))) {
          x = std::move(xt);
          f = std::move(ft);
          r = rt;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return {x, r, it, r <= tol};
  }
  return {x, r, o.max_newton, r <= tol};
}

// Constant u with sup m + Q(u) <= 0 (bilinear) or y(1-y) + sup m <= 0 (additive).
double supersolution(const Problem& p) {
  const double mmax = p.m.maxCoeff();
  if (!p.bilinear) return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * mmax));
  double u = 0;
  for (int k = 0; k < 200 && mmax + p.nl.q(u) > 0; ++k) u += 1.0;
  for (int k = 0; k < 200 && mmax + p.nl.q(u - 1.0) <= 0; ++k) u -= 1.0;
  return std::exp(u);
}

// Monotone iteration (-mu Lap + K) U_{k+1} = (m + K) U_k + b(U_k) from a supersolution.
Eigen::VectorXd monotone_sweeps(const Problem& p, const SolverOptions& o, int& sweeps) {
  const double top = supersolution(p);
  double K = 1e-3;
  for (double u : linspace(0.0, top, 257)) K = std::max(K, -p.nl.db(u) - (p.bilinear ? p.m.minCoeff() : 0.0) + 1e-3);
  SymmetricSolver solver;
  solver.factorize(detail::shifted_laplacian(p.grid, p.mu, Eigen::VectorXd::Constant(p.grid.size(), K)));
  Eigen::VectorXd u = Eigen::VectorXd::Constant(p.grid.size(), top);
  for (sweeps = 0; sweeps < o.max_sweeps; ++sweeps) {
    Eigen::VectorXd rhs(u.size());
    for (Index i = 0; i < u.size(); ++i)
      rhs[i] = (p.bilinear ? (p.m[i] + K) * u[i] : p.m[i] + K * u[i]) + p.nl.b(u[i]);
    Eigen::VectorXd next = solver.solve(rhs);
    const double change = (next - u).cwiseAbs().maxCoeff();
    u = std::move(next);
    if (change <= 1e-10 * top) break;
  }
  if (p.bilinear && u.maxCoeff() <= 1e-12 * top)
    throw NegativeSolution("monotone iteration collapsed to the trivial state");
  return u;
}

// Constant solution for the mean control, used as the default starting point.
double constant_guess(const Problem& p) {
  const double mbar = p.m.mean();
  if (!p.bilinear) return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * mbar));
  double lo = -60, hi = 60;
  if (mbar + p.nl.q(lo) <= 0 || mbar + p.nl.q(hi) >= 0)
    throw NegativeSolution("no positive constant state brackets the mean control");
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (mbar + p.nl.q(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Eigen::VectorXd log_state(const StateSolution& s) {
  if (s.form == StateForm::theta) return s.field.values();
  if (s.field.min() <= 0) throw NegativeSolution("state is not positive");
  return s.field.values().array().log();
}

Eigen::VectorXd primary_state(const StateSolution& s) {
  if (s.form == StateForm::big_theta) return s.field.values();
  return s.field.values().array().exp();
}

double state_residual(const ProblemSpec& spec, const Control& m, const ScalarField& field, StateForm form) {
  const Problem p{m.grid(), spec.nonlinearity, m.values(), spec.mu, spec.bilinear()};
  if (form == StateForm::theta && p.bilinear) return theta_residual(p, field.values()).norm();
  return primary_residual(p, field.values()).norm();
}

StateSolution solve_state(const ProblemSpec& spec, const Control& m, const std::optional<ScalarField>& init,
                          const SolverOptions& options) {
  spec.check();
  const TorusGrid& grid = m.grid();
  const Problem p{grid, spec.nonlinearity, m.values(), spec.mu, spec.bilinear()};
  if (p.bilinear && m.mean() <= 0 && spec.nonlinearity.kind == NonlinearityKind::logistic)
    throw NegativeSolution("logistic model with zero control has only the trivial state");
  const StateForm form = p.bilinear ? spec.form : StateForm::big_theta;
  const double tol = p.tol(options);
  if (init && init->grid() != grid) throw InvalidArgument("initial guess lives on a different grid");

  SymmetricSolver solver;
  auto theta_step = [&](const Eigen::VectorXd& t, const Eigen::VectorXd& f) {
    const Eigen::VectorXd big = t.array().exp();
    solver.factorize(detail::shifted_laplacian(grid, p.mu, detail::theta_jacobian_diag(grid, p.mu, p.nl, t)));
    const Eigen::VectorXd y = solver.solve(-(big.array() * f.array()).matrix());
    return Eigen::VectorXd(y.array() / big.array());
  };
  auto primary_step = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& f) {
    solver.factorize(detail::shifted_laplacian(grid, p.mu, detail::primary_jacobian_diag(p.nl, p.m, u, p.bilinear)));
    return Eigen::VectorXd(-solver.solve(f));
  };
  auto any = [](const Eigen::VectorXd& x) { return x.allFinite(); };
  auto positive = [&](const Eigen::VectorXd& x) { return !p.bilinear || x.minCoeff() > 0; };

  auto run = [&](Eigen::VectorXd x0) {
    if (form == StateForm::theta)
      return newton(std::move(x0), tol, options, [&](const Eigen::VectorXd& t) { return theta_residual(p, t); },
                    theta_step, any);
    return newton(std::move(x0), tol, options, [&](const Eigen::VectorXd& u) { return primary_residual(p, u); },
                  primary_step, positive);
  };

  Eigen::VectorXd x0;
  if (init) {
    x0 = init->values();
  } else {
    const double c = constant_guess(p);  // log variable for bilinear models
    x0 = Eigen::VectorXd::Constant(grid.size(), form == StateForm::theta ? c : (p.bilinear ? std::exp(c) : c));
  }
  if (form == StateForm::big_theta && p.bilinear && x0.minCoeff() <= 0)
    throw InvalidArgument("initial guess must be positive in the primary form");

  NewtonResult res = run(x0);
  bool fallback = false;
  int total = res.iterations;
  if (!res.converged) {
    fallback = true;
    int sweeps = 0;
    Eigen::VectorXd u = monotone_sweeps(p, options, sweeps);
    total += sweeps;
    if (form == StateForm::theta) u = u.array().log();
    res = run(u);
    total += res.iterations;
    if (!res.converged)
      throw NonConvergence("state residual " + std::to_string(res.residual) + " above tolerance " +
                           std::to_string(tol));
  }
  if (form == StateForm::big_theta && p.bilinear && res.x.minCoeff() <= 0)
    throw NegativeSolution("primary state lost positivity");
  return {ScalarField(grid, std::move(res.x)), form, res.residual, total, fallback};
}

ComparisonReport comparison_check(const ProblemSpec& spec, const Control& m, const Control& m2, double tol) {
  if ((m2.values() - m.values()).minCoeff() < -1e-14) throw InvalidArgument("comparison needs m <= m2");
  const StateSolution a = solve_state(spec, m);
  const StateSolution b = solve_state(spec, m2);
  ComparisonReport rep;
  if (spec.bilinear())
    rep.min_state_gap = (log_state(b) - log_state(a)).minCoeff();
  else
    rep.min_state_gap = (primary_state(b) - primary_state(a)).minCoeff();
  rep.objective_gap = state_objective(spec, m2, b) - state_objective(spec, m, a);
  rep.passed = rep.min_state_gap >= -tol && rep.objective_gap >= -tol;
  return rep;
}

}  // namespace bblab
