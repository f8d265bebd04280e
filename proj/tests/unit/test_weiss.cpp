#include <doctest.h>

#include <cmath>

#include "bblab/adjoint.hpp"
#include "bblab/blowup.hpp"
#include "bblab/geometry.hpp"
#include "bblab/optimize.hpp"
#include "bblab/weiss.hpp"

using namespace bblab;

namespace {

const Eigen::Vector2d kZero = Eigen::Vector2d::Zero();

template <typename Fn>
PlanarField local(Fn&& fn, int n = 192, double half = 0.6) {
  return PlanarField::sampled(fn, kZero, half, n);
}

PlanarField constant_patch(double c) {
  return local([c](const Eigen::Vector2d&) { return c; }, 16);
}

double angle(const Eigen::Vector2d& x) {
  double t = std::atan2(x[1], x[0]);
  if (t < 0) t += 2 * M_PI;
  return t >= 2 * M_PI ? 0.0 : t;
}

AngularProfile reference_profile() { return classify_profiles(1.0, 0.0, 8).front(); }

PlanarField profile_field(const AngularProfile& p, int n = 192) {
  return local([&](const Eigen::Vector2d& x) { return x.squaredNorm() * evaluate_profile(p, angle(x)); }, n);
}

const std::vector<double> kRadii{0.4, 0.3, 0.2, 0.1};

}  // namespace

TEST_CASE("harmonic quadratic has zero energy") {
  auto eta = local([](const Eigen::Vector2d& x) { return x[0] * x[1]; });
  auto p = weiss_profile(eta, constant_patch(0), constant_patch(0), kZero, kRadii);
  REQUIRE(p.psi.size() == 4);
  for (std::size_t k = 0; k < p.psi.size(); ++k) {
    CHECK(std::abs(p.psi[k]) < 1e-6);
    CHECK(p.dirichlet[k] == doctest::Approx(M_PI / 2).epsilon(1e-4));
    CHECK(p.boundary_mass[k] == doctest::Approx(M_PI / 4).epsilon(1e-4));
  }
  CHECK(p.radii.front() == 0.4);
}

TEST_CASE("quartic: degenerate regime") {
  auto eta = local([](const Eigen::Vector2d& x) { return std::pow(x.squaredNorm(), 2); });
  auto p = weiss_profile(eta, constant_patch(0), constant_patch(0), kZero, kRadii);
  // int |grad|y|^4|^2 = 2 int_dB |y|^8 = 4 pi, so Psi(r) = 0 r^4.
  for (std::size_t k = 0; k < p.psi.size(); ++k) CHECK(std::abs(p.psi[k]) < 1e-3 * p.dirichlet[k] + 10 * p.h * p.h);
  CHECK(std::abs(p.psi.back()) < std::abs(p.psi.front()));
  CHECK(p.boundary_mass.back() < p.boundary_mass.front());
}

TEST_CASE("classifier profile has constant energy") {
  const AngularProfile prof = reference_profile();
  auto eta = profile_field(prof);
  auto p = weiss_profile(eta, constant_patch(prof.f0), constant_patch(prof.g0), kZero, kRadii);
  const double ref = p.psi.front();
  CHECK(std::abs(ref) > 1e-3);
  for (double v : p.psi) CHECK(std::abs(v - ref) <= 0.02 * std::abs(ref));
  CHECK(envelope_check(p, 0.0, 0.5, 50 * eta.spacing()).empty());
}

TEST_CASE("sign flip with swapped coefficients") {
  auto eta = local([](const Eigen::Vector2d& x) { return x[0] * x[1] + 0.3 * x[0] * x.squaredNorm(); });
  auto f = local([](const Eigen::Vector2d& x) { return 1.0 + x[0]; }, 32);
  auto g = local([](const Eigen::Vector2d& x) { return 0.5 - 0.2 * x[1]; }, 32);
  auto a = weiss_profile(eta, f, g, kZero, kRadii);
  auto b = weiss_profile(eta.negated(), g, f, kZero, kRadii);
  for (std::size_t k = 0; k < a.psi.size(); ++k) CHECK(a.psi[k] == b.psi[k]);
}

TEST_CASE("envelope fit") {
  const std::vector<double> r{0.4, 0.2, 0.1};
  CHECK(fit_envelope(r, {3, 2, 1}, 0.5) == 0.0);
  const double C = fit_envelope(r, {0, 1, 2}, 0.5);
  CHECK(C > 0);
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double wk = k + C * std::sqrt(r[k]);
    const double wp = (k - 1) + C * std::sqrt(r[k - 1]);
    CHECK(wp >= wk - 1e-12);
  }
}

TEST_CASE("PDE-violating field shows envelope violations") {
  auto eta = local([](const Eigen::Vector2d& x) { return x[0] * x[1] + 20 * std::pow(x.norm(), 3); });
  auto p = weiss_profile(eta, constant_patch(0), constant_patch(0), kZero, {0.4, 0.3, 0.2});
  CHECK_FALSE(envelope_check(p, 0.0, 0.5, 50 * eta.spacing()).empty());
}

TEST_CASE("unresolved radii") {
  auto eta = local([](const Eigen::Vector2d& x) { return x[0] * x[1]; }, 64);
  CHECK_THROWS_AS(weiss_profile(eta, constant_patch(0), constant_patch(0), kZero, {0.58}), UnresolvedRadius);
  CHECK_THROWS_AS(weiss_profile(eta, constant_patch(0), constant_patch(0), kZero, {0.02}), UnresolvedRadius);
  CHECK_THROWS_AS(extract_blowup(eta, kZero, {0.4, 0.35}), InvalidArgument);
}

TEST_CASE("blow-up of an exact quadratic") {
  auto eta = local([](const Eigen::Vector2d& x) { return x[0] * x[1]; });
  auto b = extract_blowup(eta, kZero, {0.4, 0.2, 0.1});
  CHECK(b.regime == BlowupRegime::finite_psi);
  CHECK_FALSE(b.normalized);
  CHECK(b.growth_factor == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(b.cauchy_defect < 1e-8);
  for (std::size_t k = 0; k < b.limit_candidate.size(); ++k) {
    const double t = 2 * M_PI * k / b.limit_candidate.size();
    CHECK(b.limit_candidate[k] == doctest::Approx(0.25 * std::cos(t) * std::sin(t)).epsilon(1e-8));
  }
}

TEST_CASE("blow-up picks the dominant homogeneous part") {
  auto eta = local([](const Eigen::Vector2d& x) { return 50 * x[0] * x[1] + std::pow(x.norm(), 3); });
  auto b = extract_blowup(eta, kZero, {0.4, 0.2, 0.1});
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(b.limit_candidate.data(), b.limit_candidate.size());
  Eigen::VectorXd ref(t.size());
  for (Index k = 0; k < t.size(); ++k) ref[k] = std::sin(4 * M_PI * k / t.size());
  const double cosang = std::abs(t.dot(ref)) / (t.norm() * ref.norm());
  CHECK(cosang > 0.999);
}

TEST_CASE("blow-up of a catalogue profile") {
  const AngularProfile prof = reference_profile();
  auto eta = profile_field(prof, 256);
  auto b = extract_blowup(eta, kZero, {0.4, 0.2, 0.1});
  double num = 0, den = 0;
  for (std::size_t k = 0; k < b.limit_candidate.size(); ++k) {
    const double ref = 0.25 * evaluate_profile(prof, 2 * M_PI * k / b.limit_candidate.size());
    num += std::pow(b.limit_candidate[k] - ref, 2);
    den += ref * ref;
  }
  CHECK(std::sqrt(num / den) < 1e-3);
  const double D = 0.5;
  CHECK(nondegeneracy_ratio(b, D, 2) == doctest::Approx(b.l2_norm.back() / std::pow(D, 1.5)));
  CHECK(nondegeneracy_ratio(b, D, 2) > 0.1);
}

TEST_CASE("growing boundary mass triggers normalization") {
  auto eta = local([](const Eigen::Vector2d& x) { return std::pow(x.norm(), 3) * std::cos(3 * angle(x)); });
  auto b = extract_blowup(eta, kZero, {0.4, 0.2, 0.1});
  CHECK(b.growth_factor < 1);
  CHECK(b.regime == BlowupRegime::finite_psi);
  auto c = extract_blowup(local([](const Eigen::Vector2d& x) { return x[0]; }), kZero, {0.4, 0.2, 0.1});
  CHECK(c.regime == BlowupRegime::minus_infinity);
  CHECK(c.normalized);
  // eta_r = y_1 / r and S = pi / r^2, so the normalized trace is cos/(2 sqrt(pi)).
  for (std::size_t k = 0; k < c.limit_candidate.size(); k += 16) {
    const double t = 2 * M_PI * k / c.limit_candidate.size();
    CHECK(c.limit_candidate[k] == doctest::Approx(0.5 * std::cos(t) / std::sqrt(M_PI)).epsilon(1e-4));
  }
}

TEST_CASE("zero field is degenerate") {
  auto eta = local([](const Eigen::Vector2d&) { return 0.0; });
  auto b = extract_blowup(eta, kZero, {0.4, 0.2});
  CHECK(nondegeneracy_ratio(b, 0.3, 2) == 0.0);
  CHECK_THROWS_AS(nondegeneracy_ratio(b, 1.0, 2), InvalidArgument);
}

TEST_CASE("critical points of a product of sines") {
  TorusGrid g(2, 64);
  const double c = (10 + 0.5) / 64;
  auto eta = sample(g, [&](const Eigen::VectorXd& x) {
    return std::sin(2 * M_PI * (x[0] - c)) * std::sin(2 * M_PI * (x[1] - c));
  });
  auto pts = find_critical_points(eta);
  CHECK(pts.size() == 4);
  for (const auto& p : pts) {
    CHECK(std::abs(p.value) < 1e-12);
    CHECK(p.gradient < 1e-12);
  }
}

TEST_CASE("sub-harmonicity probe at an optimum") {
  TorusGrid g(2, 64);
  ProblemSpec s;
  auto rep = run_thresholding(s, OptimizeConfig{}, random_bang_bang(g, 0.3, 1));
  const Control& m = rep.final_control;
  auto st = solve_state(s, m);
  auto sw = solve_switch(s, m, st);
  auto fg = compute_fg(s, m, st, sw);
  auto level = sw.shifted();
  auto curves = trace_level_curves(level, 0.0);
  REQUIRE_FALSE(curves.curves.empty());
  const Eigen::Vector2d x0 = curves.curves.front().vertices.front();
  Eigen::Vector2d w(x0[0] - std::floor(x0[0]), x0[1] - std::floor(x0[1]));
  CHECK(subharmonicity_probe(level, fg.f, fg.g, w, 0.2) >= -50 * g.h());
  CHECK_THROWS_AS(subharmonicity_probe(level, fg.f, fg.g, w, 0.45), InvalidArgument);
}
