#include "bblab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bblab {

std::string to_string(Scheme s) { return s == Scheme::thresholding ? "thresholding" : "projected_gradient"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "thresholding") return Scheme::thresholding;
  if (s == "projected_gradient") return Scheme::projected_gradient;
  throw InvalidArgument("unknown scheme '" + s + "'");
}

std::string to_string(OptimizeStatus s) {
  switch (s) {
    case OptimizeStatus::converged: return "converged";
    case OptimizeStatus::max_iter: return "max_iter";
    case OptimizeStatus::cycle_detected: return "cycle_detected";
  }
  return "?";
}

ThresholdResult threshold_step(const SwitchField& sw, const Mode& mode) {
  const ScalarField& eta = sw.eta;
  const Index n = eta.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (!mode.is_constrained()) {
    for (Index i = 0; i < n; ++i) out[i] = eta[i] > mode.value ? 1.0 : 0.0;
    return {Control(ScalarField(eta.grid(), out)), mode.value};
  }
  const Index k = static_cast<Index>(std::llround(mode.value * double(n)));
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  auto before = [&](Index a, Index b) { return eta[a] > eta[b] || (eta[a] == eta[b] && a < b); };
  double level;
  if (k <= 0) {
    level = eta.max();
  } else if (k >= n) {
    level = eta.min();
  } else {
    std::nth_element(order.begin(), order.begin() + k, order.end(), before);
    std::nth_element(order.begin(), order.begin() + (k - 1), order.begin() + k, before);
    level = 0.5 * (eta[order[k - 1]] + eta[order[k]]);
  }
  for (Index i = 0; i < std::min(k, n); ++i) out[order[i]] = 1.0;
  return {Control(ScalarField(eta.grid(), out), mode.value), level};
}

namespace {

double flipped_fraction(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return double(((a - b).array().abs() > 1e-12).count()) / double(a.size());
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - 1e-9) return false;
  return true;
}

void finish(OptimizationReport& rep, const OptimizeConfig& config) {
  rep.bang_bang_fraction = certify_bang_bang(rep.final_control, config.bang_bang_tol);
  rep.monotone = nondecreasing(rep.objective_trace);
  rep.converged = rep.status == OptimizeStatus::converged && rep.monotone;
}

}  // namespace

OptimizationReport run_thresholding(const ProblemSpec& spec, const OptimizeConfig& config, const Control& m_init) {
  spec.check();
  if (config.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  OptimizationReport rep{m_init, {}, {}, {}, 0, 0, false, true, OptimizeStatus::max_iter, 0, 0};
  Control m = m_init;
  std::optional<Control> previous;
  std::optional<ScalarField> warm;
  for (int k = 0; k < config.max_iter; ++k) {
    const StateSolution s = solve_state(spec, m, warm, config.solver);
    warm = s.field;
    const SwitchField sw = solve_switch(spec, m, s);
    rep.objective_trace.push_back(objective(spec, m, s));
    ThresholdResult next = threshold_step(sw, spec.mode);
    const double flips = flipped_fraction(next.control.values(), m.values());
    rep.threshold_trace.push_back(next.level);
    rep.flip_trace.push_back(flips);
    rep.iterations = k + 1;
    rep.fixed_point_residual = flips;
    rep.final_threshold = next.level;
    if (flips <= config.fixed_point_tol) {
      rep.status = OptimizeStatus::converged;
      rep.final_control = next.control;
      break;
    }
    if (next.control.values().maxCoeff() == 0.0 && spec.bilinear() &&
        spec.nonlinearity.kind == NonlinearityKind::logistic) {
      // The empty control only carries the trivial state, so the iteration cannot continue;
      // it is absorbing once the penalty exceeds the switch function.
      const Eigen::VectorXd w = spec.objective.weights(m.grid());
      double j0 = 0;
      for (Index i = 0; i < w.size(); ++i) j0 += spec.objective.psi(w[i], 0.0);
      j0 *= m.grid().cell_volume();
      if (std::isfinite(j0)) {
        rep.objective_trace.push_back(j0);
        rep.status = OptimizeStatus::converged;
        rep.final_control = next.control;
        break;
      }
    }
    if (previous && flipped_fraction(next.control.values(), previous->values()) == 0.0) {
      rep.status = OptimizeStatus::cycle_detected;
      rep.final_control = next.control;
      break;
    }
    previous = m;
    m = next.control;
    rep.final_control = m;
  }
  finish(rep, config);
  return rep;
}

Control project_admissible(const Eigen::VectorXd& v, const TorusGrid& grid, const Mode& mode) {
  if (!mode.is_constrained())
    return Control(ScalarField(grid, v.cwiseMax(0.0).cwiseMin(1.0)));
  const double m0 = mode.value;
  auto mean_at = [&](double tau) { return (v.array() + tau).cwiseMax(0.0).cwiseMin(1.0).mean(); };
  double lo = -1.0 - v.maxCoeff(), hi = 1.0 - v.minCoeff();
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) < m0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  return Control(ScalarField(grid, (v.array() + tau).cwiseMax(0.0).cwiseMin(1.0).matrix()), m0);
}

OptimizationReport run_projected_gradient(const ProblemSpec& spec, const OptimizeConfig& config,
                                          const Control& m_init) {
  spec.check();
  if (config.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (!(config.gradient_step > 0)) throw InvalidArgument("gradient step must be positive");
  const TorusGrid& grid = m_init.grid();
  Control m = project_admissible(m_init.values(), grid, spec.mode);
  OptimizationReport rep{m, {}, {}, {}, 0, 0, false, true, OptimizeStatus::max_iter, 0, 0};
  StateSolution s = solve_state(spec, m, std::nullopt, config.solver);
  double J = objective(spec, m, s);
  rep.objective_trace.push_back(J);
  double step = config.gradient_step;
  const double min_step = config.gradient_step * 1e-14;
  const double max_step = config.gradient_step * 1048576.0;
  const double c = spec.mode.penalty();
  const double vol = grid.cell_volume();
  for (int k = 0; k < config.max_iter; ++k) {
    const SwitchField sw = solve_switch(spec, m, s);
    const Eigen::VectorXd grad = (sw.eta.values().array() - c).matrix();
    // Stationarity: displacement of one projected step of the nominal length.
    const double stat = (project_admissible(m.values() + config.gradient_step * grad, grid, spec.mode).values() -
                         m.values()).cwiseAbs().maxCoeff();
    rep.fixed_point_residual = stat;
    if (stat <= config.gradient_tol) {
      rep.status = OptimizeStatus::converged;
      break;
    }
    // Armijo on the projection arc; below round-off the predicted gain is not measurable
    // and the step is taken as long as J does not drop.
    const double floor = 1e-13 * std::max(1.0, std::abs(J));
    for (;;) {
      Control trial = project_admissible(m.values() + step * grad, grid, spec.mode);
      const double pred = vol * grad.dot(trial.values() - m.values());
      StateSolution st = solve_state(spec, trial, s.field, config.solver);
      const double Jt = objective(spec, trial, st);
      if (Jt - J >= 1e-4 * pred || (pred <= floor && Jt >= J - floor)) {
        rep.flip_trace.push_back((trial.values() - m.values()).cwiseAbs().maxCoeff());
        m = std::move(trial);
        s = std::move(st);
        J = Jt;
        break;
      }
      step *= 0.5;
      if (step < min_step) throw StepUnderflow("projected-gradient step collapsed");
    }
    rep.iterations = k + 1;
    rep.objective_trace.push_back(J);
    rep.threshold_trace.push_back(step);
    rep.final_control = m;
    // A step that no longer moves the control means J cannot be improved at round-off level.
    if (rep.flip_trace.back() <= config.gradient_tol) {
      rep.status = OptimizeStatus::converged;
      break;
    }
    step = std::min(2.0 * step, max_step);
  }
  finish(rep, config);
  return rep;
}

OptimizationReport run_optimizer(const ProblemSpec& spec, const OptimizeConfig& config, const Control& m_init) {
  return config.scheme == Scheme::thresholding ? run_thresholding(spec, config, m_init)
                                               : run_projected_gradient(spec, config, m_init);
}

double certify_bang_bang(const Control& m, double tol) {
  if (!(tol > 0 && tol < 0.5)) throw InvalidArgument("bang-bang tolerance must lie in (0, 0.5)");
  const auto& v = m.values().array();
  return double(((v > tol) && (v < 1.0 - tol)).count()) / double(m.values().size());
}

Control round_control(const Control& m, double tol) {
  Eigen::VectorXd v = m.values();
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] <= tol) v[i] = 0;
    if (v[i] >= 1.0 - tol) v[i] = 1;
  }
  return Control(ScalarField(m.grid(), v), m.target_volume());
}

Control random_bang_bang(const TorusGrid& grid, double m0, std::uint64_t seed) {
  const Index n = grid.size();
  const Index k = static_cast<Index>(std::llround(m0 * double(n)));
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < k; ++i) v[order[i]] = 1.0;
  return Control(ScalarField(grid, v), m0);
}

SecondOrderReport second_order_check(const ProblemSpec& spec, const Control& m_star, const SwitchField& eta,
                                     int samples, double r0, std::uint64_t seed) {
  if (!(r0 > 0 && r0 <= 0.1)) throw InvalidArgument("perturbation radius must lie in (0, 0.1]");
  if (samples < 1) throw InvalidArgument("need at least one sample");
  if (certify_bang_bang(m_star, 1e-9) > 0) throw InvalidArgument("second-order check needs a bang-bang control");
  const TorusGrid& g = m_star.grid();
  if (r0 < 2 * g.h()) throw UnresolvedRadius("perturbation radius below two cells");
  const bool constrained = spec.mode.is_constrained();
  const double c = spec.mode.penalty();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> cell(0, g.size() - 1);
  std::uniform_real_distribution<double> radius(0.5 * r0, r0);

  SecondOrderReport rep;
  for (int s = 0; s < samples; ++s) {
    std::vector<Index> in, out;
    double r = 0;
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      const Index ci = cell(rng);
      const Eigen::VectorXd x0 = g.center(ci);
      const MultiIndex base = g.unravel(ci);
      r = radius(rng);
      in.clear();
      out.clear();
      const int reach = static_cast<int>(std::ceil(r * g.n()));
      MultiIndex off{0, 0, 0};
      const int lo1 = g.dim() > 1 ? -reach : 0, lo2 = g.dim() > 2 ? -reach : 0;
      for (off[0] = -reach; off[0] <= reach; ++off[0])
        for (off[1] = lo1; off[1] <= -lo1; ++off[1])
          for (off[2] = lo2; off[2] <= -lo2; ++off[2]) {
            MultiIndex idx = base;
            for (int a = 0; a < 3; ++a) idx[a] += off[a];
            const Index i = g.ravel(idx);
            if (torus_delta(x0, g.center(i)).norm() >= r) continue;
            (m_star[i] > 0.5 ? in : out).push_back(i);
          }
      found = constrained ? (!in.empty() && !out.empty()) : (!in.empty() || !out.empty());
    }
    if (!found) throw NoAdmissiblePerturbation("no sampled ball meets both phases");

    std::shuffle(in.begin(), in.end(), rng);
    std::shuffle(out.begin(), out.end(), rng);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(g.size());
    if (constrained) {
      std::uniform_int_distribution<std::size_t> count(1, std::min(in.size(), out.size()));
      const std::size_t k = count(rng);
      for (std::size_t i = 0; i < k; ++i) {
        delta[in[i]] = -1.0;
        delta[out[i]] = 1.0;
      }
    } else {
      const bool add = in.empty() || (!out.empty() && std::bernoulli_distribution(0.5)(rng));
      auto& pool = add ? out : in;
      std::uniform_int_distribution<std::size_t> count(1, pool.size());
      const std::size_t k = count(rng);
      for (std::size_t i = 0; i < k; ++i) delta[pool[i]] = add ? 1.0 : -1.0;
    }
    const ScalarField d(g, delta);
    const double first = g.cell_volume() * ((eta.eta.values().array() - c) * delta.array()).sum();
    const double w1 = neg_sobolev_norm(d, 1).value;
    rep.rho.push_back(-first / (w1 * w1));
    rep.radius.push_back(r);
  }
  rep.min_rho = *std::min_element(rep.rho.begin(), rep.rho.end());
  rep.mean_rho = std::accumulate(rep.rho.begin(), rep.rho.end(), 0.0) / double(rep.rho.size());
  return rep;
}

}  // namespace bblab
