#include "bblab/weiss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bblab {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

void check_radius(const PlanarField& eta, const Eigen::Vector2d& x0, double r) {
  if (r < 4 * eta.spacing()) throw UnresolvedRadius("radius below 4h");
  if (!eta.contains_disk(x0, r)) throw UnresolvedRadius("disk leaves the sampled patch");
}

std::vector<double> sorted_decreasing(std::vector<double> r) {
  std::sort(r.begin(), r.end(), std::greater<>());
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] < r[k - 1])) throw InvalidArgument("radii must be distinct");
  return r;
}

}  // namespace

double WeissProfile::W(std::size_t k) const { return psi[k] + C * std::pow(radii[k], beta); }

WeissProfile weiss_profile(const PlanarField& eta, const PlanarField& f, const PlanarField& g,
                           const Eigen::Vector2d& x0, const std::vector<double>& radii_in,
                           const WeissOptions& o) {
  WeissProfile prof;
  prof.center = x0;
  prof.radii = sorted_decreasing(radii_in);
  prof.beta = o.beta;
  prof.h = eta.spacing();
  const int nt = o.n_theta;
  const double dth = kTwoPi / nt;
  for (double r : prof.radii) {
    check_radius(eta, x0, r);
    const int nr = std::max(o.min_radial, static_cast<int>(std::ceil(o.radial_per_h * r / eta.spacing())));
    const double drho = 1.0 / nr;
    // Dirichlet term by Green's identity, int_dB eta_r d_rho eta_r - int_B eta_r Lap eta_r:
    // gradients of sampled C^{1,1} fields are least accurate next to the free
    // boundary, where eta_r itself vanishes.
    double dir = 0, bulk = 0;
    Eigen::VectorXd trace(nt);
    for (int k = 0; k < nt; ++k) {
      const Eigen::Vector2d e(std::cos(k * dth), std::sin(k * dth));
      for (int l = 0; l < nr; ++l) {
        const double rho = (l + 0.5) * drho;
        const Eigen::Vector2d x = x0 + r * rho * e;
        const double v = eta.value(x) / (r * r);
        const double w = rho * drho * dth;
        dir -= v * eta.laplacian(x) * w;
        bulk += (f.value(x) * std::max(v, 0.0) + g.value(x) * std::max(-v, 0.0)) * w;
      }
      const Eigen::Vector2d xb = x0 + r * e;
      trace[k] = eta.value(xb) / (r * r);
      dir += trace[k] * eta.gradient(xb).dot(e) / r * dth;
    }
    const double S = trace.squaredNorm() * dth;
    prof.dirichlet.push_back(dir);
    prof.bulk.push_back(bulk);
    prof.boundary_mass.push_back(S);
    prof.psi.push_back(dir - 2 * bulk - 2 * S);
    prof.traces.push_back(std::move(trace));
  }
  prof.C = fit_envelope(prof.radii, prof.psi, o.beta);
  return prof;
}

double fit_envelope(const std::vector<double>& radii, const std::vector<double>& psi, double beta) {
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
  double C = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t a = order[k - 1], b = order[k];
    const double drop = psi[a] - psi[b];
    if (drop > 0) C = std::max(C, drop / (std::pow(radii[b], beta) - std::pow(radii[a], beta)));
  }
  return C;
}

std::vector<EnvelopeViolation> envelope_check(const WeissProfile& p, double C, double beta, double slack,
                                              double c0) {
  if (p.traces.size() != p.radii.size()) throw InvalidArgument("profile lacks boundary traces");
  std::vector<EnvelopeViolation> out;
  auto W = [&](std::size_t k) { return p.psi[k] + C * std::pow(p.radii[k], beta); };
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    for (std::size_t j = 0; j < p.radii.size(); ++j) {
      const double r = p.radii[i], s = p.radii[j];
      if (!(r < s && s < 2 * r)) continue;
      const double dth = kTwoPi / p.traces[i].size();
      const double diff = (p.traces[j] - p.traces[i]).squaredNorm() * dth;
      const double lhs = W(j) - W(i);
      const double rhs = c0 * diff - slack;
      if (lhs < rhs) out.push_back({r, s, lhs, rhs, rhs - lhs});
    }
  return out;
}

std::string to_string(BlowupRegime r) { return r == BlowupRegime::finite_psi ? "finite_psi" : "minus_infinity"; }

BlowupSequence extract_blowup(const PlanarField& eta, const Eigen::Vector2d& x0, const std::vector<double>& r_in,
                              const BlowupOptions& o) {
  BlowupSequence b;
  b.center = x0;
  b.radii = sorted_decreasing(r_in);
  if (b.radii.size() < 2) throw InvalidArgument("blow-up needs at least two radii");
  for (std::size_t k = 1; k < b.radii.size(); ++k) {
    const double q = b.radii[k] / b.radii[k - 1];
    if (q < 0.25 - 1e-12 || q > 0.75 + 1e-12) throw InvalidArgument("radius ratio must lie in [1/4, 3/4]");
  }
  const int nt = o.n_theta, nr = o.n_rad;
  const double dth = kTwoPi / nt, drho = 1.0 / nr;
  for (double r : b.radii) {
    check_radius(eta, x0, r);
    Eigen::MatrixXd F(nt, nr);
    double S = 0, L2 = 0;
    for (int k = 0; k < nt; ++k) {
      const Eigen::Vector2d e(std::cos(k * dth), std::sin(k * dth));
      for (int l = 0; l < nr; ++l) {
        const double rho = (l + 0.5) * drho;
        F(k, l) = eta.value(x0 + r * rho * e) / (r * r);
        L2 += F(k, l) * F(k, l) * rho * drho * dth;
      }
      const double edge = eta.value(x0 + r * e) / (r * r);
      S += edge * edge * dth;
    }
    b.fields.push_back(std::move(F));
    b.boundary_mass.push_back(S);
    b.l2_norm.push_back(std::sqrt(L2));
  }
  const double s_big = b.boundary_mass.front(), s_small = b.boundary_mass.back();
  b.growth_factor = s_big > 0 ? s_small / s_big : (s_small > 0 ? std::numeric_limits<double>::infinity() : 1.0);
  if (b.growth_factor > o.growth_threshold) {
    b.regime = BlowupRegime::minus_infinity;
    b.normalized = true;
    for (std::size_t k = 0; k < b.fields.size(); ++k)
      if (b.boundary_mass[k] > 0) b.fields[k] /= std::sqrt(b.boundary_mass[k]);
  }
  // Angular trace at |x| = 1/2 of the finest rescaling.
  const double r = b.radii.back();
  const double scale = b.normalized && b.boundary_mass.back() > 0 ? 1.0 / std::sqrt(b.boundary_mass.back()) : 1.0;
  for (int k = 0; k < nt; ++k) {
    const Eigen::Vector2d e(std::cos(k * dth), std::sin(k * dth));
    b.limit_candidate.push_back(scale * eta.value(x0 + 0.5 * r * e) / (r * r));
  }
  const Eigen::MatrixXd& A = b.fields[b.fields.size() - 1];
  const Eigen::MatrixXd& B = b.fields[b.fields.size() - 2];
  double defect = 0;
  for (int k = 0; k < nt; ++k)
    for (int l = 0; l < nr; ++l) {
      const double d = A(k, l) - B(k, l);
      defect += d * d * (l + 0.5) * drho * drho * dth;
    }
  b.cauchy_defect = std::sqrt(defect);
  return b;
}

double nondegeneracy_ratio(const BlowupSequence& b, double density, int d) {
  if (!(density > 0 && density < 1)) throw InvalidArgument("density must lie in (0,1)");
  if (b.l2_norm.empty()) return 0;
  return b.l2_norm.back() / std::pow(density, (d + 4.0) / (2.0 * d));
}

std::vector<CriticalPoint> find_critical_points(const ScalarField& eta, double eps1, double eps2) {
  const TorusGrid& g = eta.grid();
  const double h = g.h();
  if (eps1 < 0) eps1 = 10 * h * h;
  if (eps2 < 0) eps2 = 10 * h;
  std::vector<CriticalPoint> out;
  for (Index i = 0; i < g.size(); ++i) {
    if (std::abs(eta[i]) >= eps1) continue;
    double g2 = 0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = (eta[g.neighbor(i, a, 1)] - eta[g.neighbor(i, a, -1)]) / (2 * h);
      g2 += d * d;
    }
    const double grad = std::sqrt(g2);
    if (grad < eps2) {
      const Eigen::VectorXd c = g.center(i);
      out.push_back({i, Eigen::Vector2d(c[0], g.dim() > 1 ? c[1] : 0.0), eta[i], grad});
    }
  }
  return out;
}

double subharmonicity_probe(const ScalarField& eta, const ScalarField& f, const ScalarField& g,
                            const Eigen::Vector2d& x0, double patch_radius) {
  const TorusGrid& grid = eta.grid();
  const int d = grid.dim();
  const double M = std::max(f.values().cwiseAbs().maxCoeff(), g.values().cwiseAbs().maxCoeff()) / (2.0 * d) * d;
  Eigen::VectorXd c(d);
  for (int a = 0; a < d; ++a) c[a] = x0[a];
  // The periodic distance is smooth away from the torus cut locus; sample well inside.
  if (patch_radius >= 0.4) throw InvalidArgument("patch radius must stay below 0.4");
  Eigen::VectorXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i)
    v[i] = std::max(eta[i], 0.0) + M * torus_delta(c, grid.center(i)).squaredNorm();
  const Eigen::VectorXd lap = apply_laplacian(grid, v);
  double worst = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < grid.size(); ++i)
    if (torus_delta(c, grid.center(i)).norm() < patch_radius) worst = std::min(worst, lap[i]);
  return worst;
}

}  // namespace bblab
