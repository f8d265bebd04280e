#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "bblab/geometry.hpp"
#include "bblab/planar.hpp"

namespace bblab {

namespace {

Eigen::Vector2d delta2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  Eigen::Vector2d d = b - a;
  d[0] -= std::round(d[0]);
  d[1] -= std::round(d[1]);
  return d;
}

}  // namespace

CurveSet trace_level_curves(const ScalarField& eta, double level, double eps2) {
  const TorusGrid& g = eta.grid();
  if (g.dim() != 2) throw InvalidArgument("level curves need a two-dimensional field");
  const int n = g.n();
  const double h = g.h();
  auto node = [&](int i, int j) { return Index(g.wrap(i)) * n + g.wrap(j); };
  auto above = [&](int i, int j) { return eta[node(i, j)] > level; };

  // Edge 2 * node(i, j) joins (i, j)-(i+1, j); edge 2 * node(i, j) + 1 joins (i, j)-(i, j+1).
  std::unordered_map<Index, int> edge_slot;
  std::vector<Eigen::Vector2d> points;
  auto crossing = [&](int i, int j, int axis) -> int {
    const Index id = 2 * node(i, j) + axis;
    auto it = edge_slot.find(id);
    if (it != edge_slot.end()) return it->second;
    const double va = eta[node(i, j)];
    const double vb = axis == 0 ? eta[node(i + 1, j)] : eta[node(i, j + 1)];
    const double t = (level - va) / (vb - va);
    Eigen::Vector2d p((g.wrap(i) + 0.5) * h, (g.wrap(j) + 0.5) * h);
    p[axis] += t * h;
    const int slot = static_cast<int>(points.size());
    points.push_back(p);
    edge_slot.emplace(id, slot);
    return slot;
  };

  std::vector<std::array<int, 2>> segments;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // Corners a, b, c, d counterclockwise; edges bottom, right, top, left.
      const bool A = above(i, j), B = above(i + 1, j), C = above(i + 1, j + 1), D = above(i, j + 1);
      const std::array<bool, 4> cut{A != B, B != C, D != C, A != D};
      const int ncut = cut[0] + cut[1] + cut[2] + cut[3];
      if (ncut == 0) continue;
      auto edge = [&](int k) {
        switch (k) {
          case 0: return crossing(i, j, 0);
          case 1: return crossing(i + 1, j, 1);
          case 2: return crossing(i, j + 1, 0);
          default: return crossing(i, j, 1);
        }
      };
      if (ncut == 2) {
        std::array<int, 2> s{-1, -1};
        int m = 0;
        for (int k = 0; k < 4; ++k)
          if (cut[k]) s[m++] = edge(k);
        segments.push_back(s);
        continue;
      }
      // Saddle: the center's phase decides which corners are cut off.
      const double avg = 0.25 * (eta[node(i, j)] + eta[node(i + 1, j)] + eta[node(i + 1, j + 1)] + eta[node(i, j + 1)]);
      const bool center_above = avg > level;
      if (A != center_above) {
        segments.push_back({edge(0), edge(3)});
        segments.push_back({edge(1), edge(2)});
      } else {
        segments.push_back({edge(0), edge(1)});
        segments.push_back({edge(2), edge(3)});
      }
    }

  std::vector<std::array<int, 2>> adj(points.size(), {-1, -1});
  for (int s = 0; s < static_cast<int>(segments.size()); ++s)
    for (int e : segments[s]) (adj[e][0] < 0 ? adj[e][0] : adj[e][1]) = s;

  const PlanarField pf = PlanarField::periodic(eta);
  CurveSet out;
  out.level = level;
  out.eps2 = eps2 < 0 ? 10 * h : eps2;
  std::vector<char> used(segments.size(), 0);
  for (int s0 = 0; s0 < static_cast<int>(segments.size()); ++s0) {
    if (used[s0]) continue;
    Curve c;
    const int start = segments[s0][0];
    int cur = start, seg = s0;
    c.vertices.push_back(points[start]);
    while (true) {
      used[seg] = 1;
      const int next = segments[seg][0] == cur ? segments[seg][1] : segments[seg][0];
      const Eigen::Vector2d& p = c.vertices.back();
      c.vertices.push_back(p + delta2(p, points[next]));
      if (next == start) break;
      cur = next;
      seg = adj[cur][0] == seg ? adj[cur][1] : adj[cur][0];
      if (seg < 0 || used[seg]) throw DegenerateInput("level set is not a union of closed curves");
    }
    const Eigen::Vector2d w = c.vertices.back() - c.vertices.front();
    c.winding = Eigen::Vector2i(static_cast<int>(std::lround(w[0])), static_cast<int>(std::lround(w[1])));

    if (!c.wraps()) {
      double area = 0;
      for (size_t k = 0; k + 1 < c.vertices.size(); ++k)
        area += c.vertices[k][0] * c.vertices[k + 1][1] - c.vertices[k + 1][0] * c.vertices[k][1];
      if (area < 0) std::reverse(c.vertices.begin(), c.vertices.end());
    }
    double flux = 0;
    c.min_gradient = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < c.vertices.size(); ++k) {
      const Eigen::Vector2d gk = pf.gradient(c.vertices[k]);
      c.min_gradient = std::min(c.min_gradient, gk.norm());
      if (k + 1 == c.vertices.size()) break;
      const Eigen::Vector2d t = c.vertices[k + 1] - c.vertices[k];
      c.length += t.norm();
      const Eigen::Vector2d gm = 0.5 * (gk + pf.gradient(c.vertices[k + 1]));
      flux += gm[0] * t[1] - gm[1] * t[0];
    }
    c.orientation = c.wraps() ? 0 : (flux > 0 ? 1 : (flux < 0 ? -1 : 0));
    c.near_critical = c.min_gradient < out.eps2;
    out.curves.push_back(std::move(c));
  }
  return out;
}

double weighted_curve_integral(const ScalarField& eta, const Curve& curve) {
  const PlanarField pf = PlanarField::periodic(eta);
  double acc = 0;
  double prev = 0;
  for (size_t k = 0; k < curve.vertices.size(); ++k) {
    const double gk = pf.gradient(curve.vertices[k]).norm();
    if (gk < 1e-14) throw DegenerateGradient("vanishing gradient on the curve");
    const double inv = 1.0 / gk;
    if (k > 0) acc += 0.5 * (prev + inv) * (curve.vertices[k] - curve.vertices[k - 1]).norm();
    prev = inv;
  }
  return acc;
}

}  // namespace bblab
