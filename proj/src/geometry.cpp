#include "bblab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace bblab {

DiscreteSet::DiscreteSet(const TorusGrid& grid, std::vector<char> mask) : grid_(grid), mask_(std::move(mask)) {
  if (static_cast<Index>(mask_.size()) != grid_.size()) throw InvalidArgument("mask length does not match grid");
}

DiscreteSet DiscreteSet::from_field(const ScalarField& f, double threshold) {
  std::vector<char> mask(f.size());
  for (Index i = 0; i < f.size(); ++i) mask[i] = f[i] > threshold;
  return DiscreteSet(f.grid(), std::move(mask));
}

Index DiscreteSet::count() const { return std::count(mask_.begin(), mask_.end(), 1); }

DiscreteSet DiscreteSet::complement() const {
  std::vector<char> m(mask_.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = !mask_[i];
  return DiscreteSet(grid_, std::move(m));
}

ScalarField DiscreteSet::as_field() const {
  Eigen::VectorXd v(grid_.size());
  for (Index i = 0; i < grid_.size(); ++i) v[i] = mask_[i] ? 1.0 : 0.0;
  return ScalarField(grid_, std::move(v));
}

namespace {

// Visits every cell whose center lies in the closed box x + [-half, half]^d
// (periodic), passing the unwrapped displacement center - x.
template <typename Fn>
void for_cells_in_box(const TorusGrid& g, const Eigen::VectorXd& x, double half, Fn&& fn) {
  const int d = g.dim();
  const double h = g.h();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    lo[a] = static_cast<int>(std::ceil((x[a] - half) / h - 0.5 - 1e-12));
    hi[a] = static_cast<int>(std::floor((x[a] + half) / h - 0.5 + 1e-12));
    if (hi[a] - lo[a] + 1 > g.n()) throw InvalidArgument("probe region exceeds the torus");
  }
  MultiIndex idx{0, 0, 0};
  Eigen::VectorXd delta(d);
  std::array<int, 3> cur = lo;
  while (true) {
    for (int a = 0; a < d; ++a) {
      idx[a] = cur[a];
      delta[a] = (cur[a] + 0.5) * h - x[a];
    }
    fn(g.ravel(idx), delta);
    int a = d - 1;
    while (a >= 0 && ++cur[a] > hi[a]) {
      cur[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

Eigen::VectorXd wrap_point(const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  for (Index a = 0; a < y.size(); ++a) y[a] -= std::floor(y[a]);
  return y;
}

}  // namespace

double density(const DiscreteSet& E, const Eigen::VectorXd& x, double r) {
  const TorusGrid& g = E.grid();
  if (r < 3 * g.h()) throw UnresolvedRadius("density radius below 3h");
  if (r >= 0.5) throw InvalidArgument("density radius must be below 1/2");
  Index in = 0, tot = 0;
  for_cells_in_box(g, x, r, [&](Index i, const Eigen::VectorXd& dx) {
    if (dx.squaredNorm() < r * r) {
      ++tot;
      in += E[i];
    }
  });
  return tot ? static_cast<double>(in) / tot : 0.0;
}

double square_density(const DiscreteSet& E, const Eigen::VectorXd& x, double side) {
  const TorusGrid& g = E.grid();
  const double half = 0.5 * side;
  Index in = 0, tot = 0;
  for_cells_in_box(g, x, half, [&](Index i, const Eigen::VectorXd& dx) {
    if (dx.cwiseAbs().maxCoeff() < half) {
      ++tot;
      in += E[i];
    }
  });
  if (tot == 0) throw UnresolvedRadius("square contains no cell centers");
  return static_cast<double>(in) / tot;
}

namespace {

// Walks the segment a -> b and returns the sample whose square density is closest
// to 1/2 at the first crossing of 1/2.
DensityScale segment_crossing(const DiscreteSet& E, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              double side) {
  const double h = E.grid().h();
  const Eigen::VectorXd delta = torus_delta(a, b);
  const int steps = std::max(1, static_cast<int>(std::ceil(4 * delta.norm() / h)));
  Eigen::VectorXd prev = a;
  double dprev = square_density(E, a, side);
  DensityScale best{side, dprev, wrap_point(a)};
  for (int k = 1; k <= steps; ++k) {
    const Eigen::VectorXd y = a + delta * (static_cast<double>(k) / steps);
    const double dy = square_density(E, y, side);
    if (std::abs(dy - 0.5) < std::abs(best.density - 0.5)) best = {side, dy, wrap_point(y)};
    if ((dprev - 0.5) * (dy - 0.5) <= 0) {
      if (std::abs(dy - 0.5) <= std::abs(dprev - 0.5)) return {side, dy, wrap_point(y)};
      return {side, dprev, wrap_point(prev)};
    }
    prev = y;
    dprev = dy;
  }
  return best;
}

}  // namespace

IntermediateDensityResult find_intermediate_density_point(const DiscreteSet& E, const Eigen::VectorXd& x0,
                                                          double eps) {
  const TorusGrid& g = E.grid();
  const double h = g.h();
  const int d = g.dim();
  if (eps < 8 * h) throw UnresolvedRadius("ball radius below 8h");
  if (eps >= 0.5) throw InvalidArgument("ball radius must be below 1/2");

  std::vector<Index> inside, outside;
  for_cells_in_box(g, x0, eps, [&](Index i, const Eigen::VectorXd& dx) {
    if (dx.squaredNorm() < eps * eps) (E[i] ? inside : outside).push_back(i);
  });
  if (inside.empty() || outside.empty()) throw DegenerateInput("ball does not meet both phases");

  // Starting pair: the most interior cells of each phase at the largest side that
  // separates them.
  IntermediateDensityResult res;
  double side = eps / std::sqrt(static_cast<double>(d));
  bool found = false;
  DensityScale cur;
  while (side >= 8 * h) {
    Index y0 = outside.front(), y1 = inside.front();
    double d0 = 2, d1 = -1;
    for (Index i : outside) {
      const double v = square_density(E, g.center(i), side);
      if (v < d0) d0 = v, y0 = i;
    }
    for (Index i : inside) {
      const double v = square_density(E, g.center(i), side);
      if (v > d1) d1 = v, y1 = i;
    }
    if (d0 < 0.5 && d1 > 0.5) {
      cur = segment_crossing(E, g.center(y0), g.center(y1), side);
      found = true;
      break;
    }
    side *= 0.5;
  }
  if (!found) throw DegenerateInput("no separating pair of squares at resolved scales");
  res.trace.push_back(cur);

  // Refinement: among the 2^d children, keep one near 1/2 or bridge a pair
  // straddling 1/2.
  const int nchild = 1 << d;
  while (cur.side * 0.5 >= 8 * h) {
    const double s = cur.side * 0.5;
    std::vector<DensityScale> kids;
    for (int c = 0; c < nchild; ++c) {
      Eigen::VectorXd y = cur.center;
      for (int a = 0; a < d; ++a) y[a] += ((c >> a) & 1 ? 0.25 : -0.25) * cur.side;
      kids.push_back({s, square_density(E, y, s), y});
    }
    auto closest = std::min_element(kids.begin(), kids.end(), [](const DensityScale& p, const DensityScale& q) {
      return std::abs(p.density - 0.5) < std::abs(q.density - 0.5);
    });
    const double tol = 1.0 / (2 * std::pow(s / h, d));
    DensityScale next = *closest;
    if (std::abs(closest->density - 0.5) > tol) {
      auto lo = std::min_element(kids.begin(), kids.end(),
                                 [](const DensityScale& p, const DensityScale& q) { return p.density < q.density; });
      auto hi = std::max_element(kids.begin(), kids.end(),
                                 [](const DensityScale& p, const DensityScale& q) { return p.density < q.density; });
      if (lo->density < 0.5 && hi->density > 0.5) {
        const DensityScale bridged = segment_crossing(E, lo->center, hi->center, s);
        if (std::abs(bridged.density - 0.5) < std::abs(next.density - 0.5)) next = bridged;
      }
    }
    next.center = wrap_point(next.center);
    cur = next;
    res.trace.push_back(cur);
  }
  res.point = cur.center;
  return res;
}

DiscreteSet essential_boundary(const DiscreteSet& E, double r_probe) {
  const TorusGrid& g = E.grid();
  if (r_probe < g.h()) throw UnresolvedRadius("probe radius below h");
  // Offsets of the probe ball, shared by every cell.
  std::vector<MultiIndex> offsets;
  const int k = static_cast<int>(std::ceil(r_probe / g.h()));
  const int d = g.dim();
  const double r2 = (r_probe / g.h()) * (r_probe / g.h());
  for (int i = -k; i <= k; ++i)
    for (int j = (d > 1 ? -k : 0); j <= (d > 1 ? k : 0); ++j)
      for (int l = (d > 2 ? -k : 0); l <= (d > 2 ? k : 0); ++l)
        if (double(i) * i + double(j) * j + double(l) * l < r2) offsets.push_back({i, j, l});
  std::vector<char> out(g.size(), 0);
  for (Index c = 0; c < g.size(); ++c) {
    const MultiIndex base = g.unravel(c);
    bool in = false, ex = false;
    for (const MultiIndex& o : offsets) {
      MultiIndex q = base;
      for (int a = 0; a < d; ++a) q[a] += o[a];
      (E[g.ravel(q)] ? in : ex) = true;
      if (in && ex) break;
    }
    out[c] = in && ex;
  }
  return DiscreteSet(g, std::move(out));
}

double perimeter(const DiscreteSet& E) {
  const TorusGrid& g = E.grid();
  Index faces = 0;
  for (Index i = 0; i < g.size(); ++i)
    for (int a = 0; a < g.dim(); ++a) faces += E[i] != E[g.neighbor(i, a, 1)];
  return std::pow(g.h(), g.dim() - 1) * static_cast<double>(faces);
}

double ball_annulus_gap(const TorusGrid& grid, const Eigen::VectorXd& x0, double r, double D) {
  if (!(D > 0 && D < 1)) throw InvalidArgument("volume fraction must lie in (0,1)");
  const int d = grid.dim();
  const double inner = r * std::pow(D, 1.0 / d);
  const double hole = r * std::pow(1 - D, 1.0 / d);
  Eigen::VectorXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double rho = torus_delta(x0, grid.center(i)).norm();
    v[i] = (rho < inner ? 1.0 : 0.0) - (rho >= hole && rho < r ? 1.0 : 0.0);
  }
  const double n = neg_sobolev_norm(ScalarField(grid, std::move(v)), 1).value;
  return n * n;
}

}  // namespace bblab
