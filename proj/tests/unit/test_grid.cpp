#include <doctest.h>

#include <cmath>
#include <random>

#include "bblab/grid.hpp"

using namespace bblab;

namespace {

ScalarField random_field(const TorusGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Eigen::VectorXd v(g.size());
  for (auto& x : v) x = N(rng);
  return ScalarField(g, v);
}

}  // namespace

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(TorusGrid(2, 4), InvalidArgument);
  CHECK_THROWS_AS(TorusGrid(4, 16), InvalidArgument);
  TorusGrid g(3, 8);
  CHECK(g.size() == 512);
  CHECK(g.h() == 1.0 / 8);
}

TEST_CASE("periodic indexing wraps") {
  TorusGrid g(2, 16);
  CHECK(g.ravel({-1, 0, 0}) == g.ravel({15, 0, 0}));
  CHECK(g.ravel({16, 17, 0}) == g.ravel({0, 1, 0}));
  for (Index i : {Index(0), Index(17), Index(255)}) CHECK(g.ravel(g.unravel(i)) == i);
  CHECK(g.neighbor(g.ravel({15, 3, 0}), 0, 1) == g.ravel({0, 3, 0}));
}

TEST_CASE("non-finite values are rejected") {
  TorusGrid g(1, 8);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  v[3] = std::nan("");
  CHECK_THROWS_AS(ScalarField(g, v), InvalidArgument);
  CHECK_THROWS_AS(ScalarField(g, Eigen::VectorXd::Zero(7)), InvalidArgument);
}

TEST_CASE("laplacian of constants vanishes") {
  TorusGrid g(2, 32);
  CHECK(laplacian(ScalarField(g, 3.7)).values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian discrete eigenfunction") {
  TorusGrid g(2, 64);
  const double h = g.h();
  auto f = sample(g, [](const Eigen::VectorXd& x) { return std::sin(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[1]); });
  const double lam = -(8 / (h * h)) * std::pow(std::sin(M_PI * h), 2);
  Eigen::VectorXd diff = laplacian(f).values() - lam * f.values();
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-10 * std::abs(lam));
  ScalarField fc(g, Eigen::VectorXd(f.values().array() + 5.0));
  CHECK((laplacian(fc).values() - laplacian(f).values()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("laplacian commutes with lattice shifts") {
  TorusGrid g(2, 16);
  auto f = random_field(g, 1);
  MultiIndex v{3, -5, 0};
  CHECK((laplacian(shift(f, v)).values() - shift(laplacian(f), v).values()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("laplacian is self-adjoint") {
  for (int d : {1, 2, 3}) {
    TorusGrid g(d, d == 3 ? 8 : 16);
    auto a = random_field(g, 2), b = random_field(g, 3);
    CHECK(std::abs(inner_product(laplacian(a), b) - inner_product(a, laplacian(b))) < 1e-10);
  }
}

TEST_CASE("negative Sobolev norms: closed forms") {
  TorusGrid g(2, 32);
  CHECK(neg_sobolev_norm(ScalarField(g, 0.0), 1).value == 0.0);
  CHECK(neg_sobolev_norm(ScalarField(g, 1.0), 1).value == doctest::Approx(1.0).epsilon(1e-14));
  auto c = sample(g, [](const Eigen::VectorXd& x) { return std::cos(2 * M_PI * x[0]); });
  const double expect = std::sqrt(0.5 / (1 + 4 * M_PI * M_PI));
  CHECK(neg_sobolev_norm(c, 1).value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(neg_sobolev_norm(c, 2).order == 2.0);
  CHECK_THROWS_AS(neg_sobolev_norm(c, 1.5), InvalidArgument);
}

TEST_CASE("Parseval and norm ordering") {
  for (int d : {1, 2, 3}) {
    TorusGrid g(d, d == 3 ? 8 : 32);
    auto f = random_field(g, 10 + d);
    Eigen::VectorXcd c = fourier_coefficients(f);
    const double ms = f.values().squaredNorm() / f.size();
    CHECK(std::abs(c.squaredNorm() - ms) < 1e-12 * ms);
    const double l2 = std::sqrt(ms);
    const double n1 = neg_sobolev_norm(f, 1).value, n2 = neg_sobolev_norm(f, 2).value;
    CHECK(n2 <= n1);
    CHECK(n1 <= l2 * (1 + 1e-14));
    CHECK(n2 > 0);
  }
}

TEST_CASE("norm ratio decays with the radius") {
  TorusGrid g(2, 256);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 0.5);
  auto rows = norm_ratio_decay(g, x0, {0.4, 0.2, 0.1, 0.05});
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].ratio < rows[k - 1].ratio);

  auto twice = norm_ratio_decay(g, x0, {0.1, 0.1});
  CHECK(twice[0].ratio == twice[1].ratio);

  TorusGrid g3(3, 32);
  auto r2 = norm_ratio_decay(g, x0, {0.2});
  auto r3 = norm_ratio_decay(g3, Eigen::VectorXd::Constant(3, 0.5), {0.2});
  CHECK(r2[0].ratio > 0);
  CHECK(r2[0].ratio < 1);
  CHECK(r3[0].ratio > 0);
  CHECK(r3[0].ratio < 1);

  CHECK_THROWS_AS(norm_ratio_decay(g, x0, {2.0 / 256}), UnresolvedRadius);
}

TEST_CASE("torus displacement is the shortest one") {
  Eigen::VectorXd a(2), b(2);
  a << 0.95, 0.1;
  b << 0.05, 0.3;
  Eigen::VectorXd d = torus_delta(a, b);
  CHECK(d[0] == doctest::Approx(0.1));
  CHECK(d[1] == doctest::Approx(0.2));
}
