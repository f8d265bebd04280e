#include "bblab/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bblab/detail/operators.hpp"

namespace bblab {
namespace {

using detail::SymmetricSolver;

void require_grid(const Control& m, const StateSolution& s) {
  if (m.grid() != s.field.grid()) throw InvalidArgument("control and state live on different grids");
}

// Factorizes the symmetric Jacobian S. Bilinear: S = Theta J Theta^{-1} in the log
// variable; additive: the primary Jacobian itself.
void factorize_jacobian(const ProblemSpec& spec, const Control& m, const StateSolution& s,
                        const Eigen::VectorXd& t, SymmetricSolver& solver) {
  const TorusGrid& g = m.grid();
  const Eigen::VectorXd diag =
      spec.bilinear() ? detail::theta_jacobian_diag(g, spec.mu, spec.nonlinearity, t)
                      : detail::primary_jacobian_diag(spec.nonlinearity, m.values(), primary_state(s), false);
  solver.factorize(detail::shifted_laplacian(g, spec.mu, diag));
}

// Solves J x = rhs (forward linearized system).
Eigen::VectorXd solve_forward(const ProblemSpec& spec, const Control& m, const StateSolution& s,
                              const Eigen::VectorXd& rhs) {
  SymmetricSolver solver;
  if (!spec.bilinear()) {
    factorize_jacobian(spec, m, s, {}, solver);
    return solver.solve(rhs);
  }
  const Eigen::VectorXd t = log_state(s);
  factorize_jacobian(spec, m, s, t, solver);
  const Eigen::ArrayXd big = t.array().exp();
  return (solver.solve((big * rhs.array()).matrix()).array() / big).matrix();
}

// e^{theta_j - theta_i} weighted sum of (a_j - a_i)(b_j - b_i), times mu/h^2.
Eigen::VectorXd edge_energy(const TorusGrid& g, double mu, const Eigen::VectorXd& t, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) {
  const double coef = mu * g.n() * g.n();
  Eigen::VectorXd e(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    double s = 0;
    for (int ax = 0; ax < g.dim(); ++ax)
      for (int dir : {-1, 1}) {
        const Index j = g.neighbor(i, ax, dir);
        s += std::exp(t[j] - t[i]) * (a[j] - a[i]) * (b[j] - b[i]);
      }
    e[i] = coef * s;
  }
  return e;
}

}  // namespace

ScalarField SwitchField::shifted() const {
  if (!threshold_shift) return eta;
  return ScalarField(eta.grid(), (eta.values().array() - *threshold_shift).matrix());
}

SwitchField solve_switch(const ProblemSpec& spec, const Control& m, const StateSolution& s) {
  require_grid(m, s);
  const TorusGrid& g = m.grid();
  const Eigen::VectorXd w = spec.objective.weights(g);
  Eigen::VectorXd rhs(g.size());
  Eigen::VectorXd eta;
  double relres = 0;
  SymmetricSolver solver;
  if (spec.bilinear()) {
    const Eigen::VectorXd t = log_state(s);
    for (Index i = 0; i < g.size(); ++i) rhs[i] = spec.objective.dj(w[i], t[i]);
    factorize_jacobian(spec, m, s, t, solver);
    const Eigen::ArrayXd big = t.array().exp();
    // L = Theta S Theta^{-1}: S (eta / Theta) = rhs / Theta.
    auto apply_l = [&](const Eigen::VectorXd& e) {
      const double coef = spec.mu * g.n() * g.n();
      Eigen::VectorXd out(g.size());
      for (Index i = 0; i < g.size(); ++i) {
        double acc = -spec.nonlinearity.dq(t[i]) * e[i];
        for (int ax = 0; ax < g.dim(); ++ax)
          for (int dir : {-1, 1}) {
            const Index j = g.neighbor(i, ax, dir);
            acc += coef * (e[i] * std::exp(t[j] - t[i]) - e[j] * std::exp(t[i] - t[j]));
          }
        out[i] = acc;
      }
      return out;
    };
    eta = (solver.solve((rhs.array() / big).matrix()).array() * big).matrix();
    const double bnorm = rhs.norm();
    if (bnorm > 0) {
      for (int refine = 0; refine < 3; ++refine) {
        const Eigen::VectorXd r = rhs - apply_l(eta);
        relres = r.norm() / bnorm;
        if (relres <= 1e-13) break;
        eta += (solver.solve((r.array() / big).matrix()).array() * big).matrix();
      }
      relres = (rhs - apply_l(eta)).norm() / bnorm;
    }
  } else {
    const Eigen::VectorXd u = primary_state(s);
    for (Index i = 0; i < g.size(); ++i) rhs[i] = spec.objective.dpsi(w[i], u[i]);
    factorize_jacobian(spec, m, s, {}, solver);
    eta = solver.solve(rhs);
    const double bnorm = rhs.norm();
    if (bnorm > 0) {
      Eigen::VectorXd diag = detail::primary_jacobian_diag(spec.nonlinearity, m.values(), u, false);
      const Eigen::VectorXd r = rhs - (-spec.mu * apply_laplacian(g, eta) + diag.cwiseProduct(eta));
      relres = r.norm() / bnorm;
    }
  }
  if (!eta.allFinite() || relres > 1e-8) throw SingularSystem("adjoint solve did not reach the residual target");
  SwitchField out{ScalarField(g, eta), eta.minCoeff(), std::nullopt, relres};
  if (!spec.mode.is_constrained()) {
    out.threshold_shift = spec.mode.value;
  } else {
    // Bang-bang controls: the level separating the two phases (midpoint of the gap).
    double lo_in = std::numeric_limits<double>::infinity(), hi_out = -lo_in;
    bool bang = true;
    for (Index i = 0; i < g.size() && bang; ++i) {
      if (m[i] == 1.0) lo_in = std::min(lo_in, out.eta[i]);
      else if (m[i] == 0.0) hi_out = std::max(hi_out, out.eta[i]);
      else bang = false;
    }
    if (bang && std::isfinite(lo_in) && std::isfinite(hi_out)) out.threshold_shift = 0.5 * (lo_in + hi_out);
  }
  return out;
}

double state_objective(const ProblemSpec& spec, const Control& m, const StateSolution& s) {
  require_grid(m, s);
  const TorusGrid& g = m.grid();
  const Eigen::VectorXd w = spec.objective.weights(g);
  double acc = 0;
  if (spec.bilinear()) {
    const Eigen::VectorXd t = log_state(s);
    for (Index i = 0; i < g.size(); ++i) acc += spec.objective.j(w[i], t[i]);
  } else {
    const Eigen::VectorXd u = primary_state(s);
    for (Index i = 0; i < g.size(); ++i) acc += spec.objective.psi(w[i], u[i]);
  }
  return g.cell_volume() * acc;
}

double objective(const ProblemSpec& spec, const Control& m, const StateSolution& s) {
  return state_objective(spec, m, s) - spec.mode.penalty() * m.grid().cell_volume() * m.values().sum();
}

ScalarField linearized_state(const ProblemSpec& spec, const Control& m, const StateSolution& s,
                             const ScalarField& h) {
  require_grid(m, s);
  return ScalarField(m.grid(), solve_forward(spec, m, s, h.values()));
}

ScalarField second_order_state(const ProblemSpec& spec, const Control& m, const StateSolution& s,
                               const ScalarField& h) {
  const TorusGrid& g = m.grid();
  const Eigen::VectorXd a = linearized_state(spec, m, s, h).values();
  Eigen::VectorXd rhs;
  if (spec.bilinear()) {
    const Eigen::VectorXd t = log_state(s);
    rhs = edge_energy(g, spec.mu, t, a, a);
    for (Index i = 0; i < g.size(); ++i) rhs[i] += spec.nonlinearity.d2q(t[i]) * a[i] * a[i];
  } else {
    const Eigen::VectorXd u = primary_state(s);
    rhs.resize(g.size());
    for (Index i = 0; i < g.size(); ++i) rhs[i] = spec.nonlinearity.d2b(u[i]) * a[i] * a[i];
  }
  return ScalarField(g, solve_forward(spec, m, s, rhs));
}

double hessian_form(const ProblemSpec& spec, const Control& m, const StateSolution& s, const SwitchField& eta,
                    const ScalarField& h1, const ScalarField& h2) {
  const TorusGrid& g = m.grid();
  const Eigen::VectorXd a = linearized_state(spec, m, s, h1).values();
  const Eigen::VectorXd b = linearized_state(spec, m, s, h2).values();
  const Eigen::VectorXd w = spec.objective.weights(g);
  const Eigen::VectorXd& e = eta.eta.values();
  double acc = 0;
  if (spec.bilinear()) {
    const Eigen::VectorXd t = log_state(s);
    const Eigen::VectorXd edge = edge_energy(g, spec.mu, t, a, b);
    for (Index i = 0; i < g.size(); ++i) {
      const double W = spec.nonlinearity.d2q(t[i]) * e[i] + spec.objective.d2j(w[i], t[i]);
      acc += e[i] * edge[i] + W * a[i] * b[i];
    }
  } else {
    const Eigen::VectorXd u = primary_state(s);
    for (Index i = 0; i < g.size(); ++i) {
      const double W = spec.nonlinearity.d2b(u[i]) * e[i] + spec.objective.d2psi(w[i], u[i]);
      acc += W * a[i] * b[i];
    }
  }
  return g.cell_volume() * acc;
}

DerivativeReport derivative_check(const ProblemSpec& spec, const Control& m, const ScalarField& h,
                                  const std::vector<double>& steps, bool second_order) {
  if (h.grid() != m.grid()) throw InvalidArgument("direction lives on a different grid");
  const TorusGrid& g = m.grid();
  SolverOptions opt;
  opt.polish_steps = 2;
  const StateSolution base = solve_state(spec, m, std::nullopt, opt);
  const SwitchField eta = solve_switch(spec, m, base);
  const double c = spec.mode.penalty();

  DerivativeReport rep{h, 0, {}, 0, 0, {}, steps, 0};
  rep.first_analytic = g.cell_volume() * ((eta.eta.values().array() - c) * h.values().array()).sum();
  const double j0 = objective(spec, m, base);

  auto at = [&](double t) {
    const Control mt(ScalarField(g, m.values() + t * h.values()));
    return objective(spec, mt, solve_state(spec, mt, base.field, opt));
  };
  // Errors are relative to the size of the functional: a mean-zero direction can make the
  // first derivative itself vanish.
  const double first_scale = g.cell_volume() * ((eta.eta.values().array() - c) * h.values().array()).abs().sum();
  auto rel = [](double fd, double an, double scale) {
    scale = std::max(std::abs(an), scale);
    return scale > 0 ? std::abs(fd - an) / scale : std::abs(fd - an);
  };

  for (double t : steps) {
    const double fd = (at(t) - j0) / t;
    rep.first_order.push_back({t, fd, rep.first_analytic, rel(fd, rep.first_analytic, first_scale)});
  }

  if (second_order) {
    rep.second_analytic = hessian_form(spec, m, base, eta, h, h);
    const Eigen::VectorXd a = linearized_state(spec, m, base, h).values();
    const Eigen::VectorXd b = second_order_state(spec, m, base, h).values();
    const Eigen::VectorXd w = spec.objective.weights(g);
    double acc = 0;
    if (spec.bilinear()) {
      const Eigen::VectorXd t = log_state(base);
      for (Index i = 0; i < g.size(); ++i)
        acc += spec.objective.d2j(w[i], t[i]) * a[i] * a[i] + spec.objective.dj(w[i], t[i]) * b[i];
    } else {
      const Eigen::VectorXd u = primary_state(base);
      for (Index i = 0; i < g.size(); ++i)
        acc += spec.objective.d2psi(w[i], u[i]) * a[i] * a[i] + spec.objective.dpsi(w[i], u[i]) * b[i];
    }
    rep.second_via_state = g.cell_volume() * acc;
    for (double t : steps) {
      const double fd = (at(t) - 2.0 * j0 + at(-t)) / (t * t);
      rep.second_order.push_back({t, fd, rep.second_analytic, rel(fd, rep.second_analytic, 0.0)});
    }
  }

  // Least-squares slope over the entries whose error is above the round-off floor.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& e : rep.first_order) {
    if (e.rel_err <= 0) continue;
    const double x = std::log(e.t), y = std::log(e.rel_err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) rep.observed_order = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

double principal_eigenvalue(const ProblemSpec& spec, const Control& m, const StateSolution& s, double tol,
                            int max_iter) {
  require_grid(m, s);
  const TorusGrid& g = m.grid();
  Eigen::VectorXd diag;
  if (spec.bilinear())
    diag = detail::theta_jacobian_diag(g, spec.mu, spec.nonlinearity, log_state(s));
  else
    diag = detail::primary_jacobian_diag(spec.nonlinearity, m.values(), primary_state(s), false);
  // Gershgorin lower bound of S; shift so the shifted operator is positive definite.
  const double lower = diag.minCoeff();
  const double shift = lower <= 0 ? -lower + 1.0 : 0.0;
  SymmetricSolver solver;
  solver.factorize(detail::shifted_laplacian(g, spec.mu, (diag.array() + shift).matrix()));
  const detail::SpMat op = detail::shifted_laplacian(g, spec.mu, diag);

  Eigen::VectorXd x = Eigen::VectorXd::Ones(g.size());
  x.normalize();
  double lambda = (x.dot(op * x));
  for (int it = 0; it < max_iter; ++it) {
    x = solver.solve(x);
    x.normalize();
    const double next = x.dot(op * x);
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) return next;
    lambda = next;
  }
  throw NonConvergence("inverse iteration for the principal eigenvalue hit the iteration cap");
}

CoefficientPair compute_fg(const ProblemSpec& spec, const Control& m, const StateSolution& s,
                           const SwitchField& sw) {
  if (!spec.bilinear()) throw InvalidArgument("free-boundary coefficients need bilinear coupling");
  require_grid(m, s);
  const TorusGrid& g = m.grid();
  const Eigen::VectorXd t = log_state(s);
  const Eigen::VectorXd& e = sw.eta.values();
  const Eigen::VectorXd w = spec.objective.weights(g);
  const double coef = spec.mu * g.n() * g.n();
  const Nonlinearity& nl = spec.nonlinearity;
  Eigen::VectorXd f(g.size()), gg(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    // -mu Lap_h eta_i = bracket_i + 2 eta_i m_i, exactly, on solutions.
    double bracket = spec.objective.dj(w[i], t[i]) + nl.dq(t[i]) * e[i] + 2.0 * e[i] * nl.q(t[i]);
    for (int ax = 0; ax < g.dim(); ++ax)
      for (int dir : {-1, 1}) {
        const Index j = g.neighbor(i, ax, dir);
        const double d = t[j] - t[i];
        const double sh = std::sinh(0.5 * d);
        bracket += coef * (4.0 * sh * sh * e[i] + (e[j] - e[i]) * std::expm1(-d));
      }
    gg[i] = -bracket / spec.mu;
    f[i] = (bracket + 2.0 * e[i]) / spec.mu;
  }
  CoefficientPair out{ScalarField(g, f), ScalarField(g, gg), (f + gg).minCoeff(), 0};
  Eigen::VectorXd r = -apply_laplacian(g, e);
  for (Index i = 0; i < g.size(); ++i) r[i] -= f[i] * m[i] - gg[i] * (1.0 - m[i]);
  out.residual_rms = std::sqrt(r.squaredNorm() / double(g.size()));
  return out;
}

}  // namespace bblab
