#include "bblab/blowup.hpp"

#include <algorithm>
#include <cmath>

#include "bblab/errors.hpp"

namespace bblab {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double branch_value(const AngularProfile& p, const Component& c, double u) {
  const double s = std::sin(u);
  const double quad = c.sign == Sign::positive ? -0.5 * p.f0 : 0.5 * p.g0;
  return quad * s * s + c.coefficient * std::sin(2 * u);
}

double branch_slope(const AngularProfile& p, const Component& c, double u) {
  const double quad = c.sign == Sign::positive ? -0.5 * p.f0 : 0.5 * p.g0;
  return quad * std::sin(2 * u) + 2 * c.coefficient * std::cos(2 * u);
}

// Component containing theta and the local coordinate u.
std::pair<const Component*, double> locate(const AngularProfile& p, double theta) {
  if (!(theta >= 0 && theta < kTwoPi)) throw AngleOutOfRange("profile angle must lie in [0, 2 pi)");
  if (p.components.empty()) throw InvalidArgument("empty profile");
  double u = wrap_angle(theta - p.components.front().start);
  for (const Component& c : p.components) {
    if (u < c.length) return {&c, u};
    u -= c.length;
  }
  const Component& last = p.components.back();
  return {&last, u + last.length};
}

AngularProfile assemble(double f0, double g0, int N, double a, double b, double B) {
  AngularProfile p{f0, g0, {}, false};
  double start = 0;
  for (int k = 0; k < N; ++k) {
    const bool neg = k % 2 == 0;
    p.components.push_back({neg ? Sign::negative : Sign::positive, neg ? a : b, neg ? -B : B, start});
    start += neg ? a : b;
  }
  return p;
}

bool signs_hold(const AngularProfile& p) {
  for (const Component& c : p.components)
    for (int k = 1; k < 64; ++k) {
      const double v = branch_value(p, c, c.length * k / 64.0);
      if (c.sign == Sign::positive ? !(v > 0) : !(v < 0)) return false;
    }
  return true;
}

}  // namespace

std::vector<double> AngularProfile::interface_angles() const {
  std::vector<double> out;
  for (const Component& c : components) out.push_back(wrap_angle(c.start));
  return out;
}

double evaluate_profile(const AngularProfile& p, double theta) {
  const auto [c, u] = locate(p, theta);
  return branch_value(p, *c, u);
}

double evaluate_profile_derivative(const AngularProfile& p, double theta) {
  const auto [c, u] = locate(p, theta);
  return branch_slope(p, *c, u);
}

AngularProfile rotate(const AngularProfile& p, double omega) {
  AngularProfile q = p;
  for (Component& c : q.components) c.start = wrap_angle(c.start + omega);
  return q;
}

double interface_defect(const AngularProfile& p) {
  const double scale = std::max({1.0, std::abs(p.f0), std::abs(p.g0)});
  double worst = 0;
  const std::size_t n = p.components.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Component& c = p.components[k];
    const Component& next = p.components[(k + 1) % n];
    worst = std::max(worst, std::abs(branch_value(p, c, 0.0)));
    worst = std::max(worst, std::abs(branch_value(p, c, c.length)));
    worst = std::max(worst, std::abs(branch_slope(p, c, c.length) - branch_slope(p, next, 0.0)));
  }
  return worst / scale;
}

std::vector<AngularProfile> classify_profiles(double f0, double g0, int N_max) {
  if (!(f0 > 0)) throw InvalidArgument("classification needs f0 > 0");
  if (!(f0 + g0 > 0)) throw InvalidArgument("classification needs f0 + g0 > 0");
  if (N_max < 2 || N_max % 2 != 0) throw InvalidArgument("N_max must be even and at least 2");
  std::vector<AngularProfile> out;
  for (int N = 2; N <= N_max; N += 2) {
    const double L = 2.0 * kTwoPi / N;  // |I_-| + |I_+|
    // Smooth form of f0 tan(b) = g0 tan(a), b = L - a, with both lengths in (0, pi).
    auto F = [&](double a) {
      const double b = L - a;
      return f0 * std::sin(b) * std::cos(a) - g0 * std::sin(a) * std::cos(b);
    };
    const double lo = std::max(0.0, L - M_PI), hi = std::min(L, M_PI);
    if (!(hi > lo)) continue;
    const int samples = 4096;
    std::vector<double> roots;
    double x0 = lo, f_prev = F(lo + (hi - lo) * 0.5 / samples);
    x0 = lo + (hi - lo) * 0.5 / samples;
    for (int k = 1; k < samples; ++k) {
      const double x1 = lo + (hi - lo) * (k + 0.5) / samples;
      const double f1 = F(x1);
      if (f_prev == 0.0) {
        roots.push_back(x0);
      } else if ((f_prev < 0) != (f1 < 0) && f1 != 0.0) {
        double a = x0, b = x1, fa = f_prev;
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = F(mid);
          if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
      x0 = x1;
      f_prev = f1;
    }
    for (double a : roots) {
      const double b = L - a;
      const double cb = std::cos(b);
      if (std::abs(cb) < 1e-12) continue;  // positive arc of length pi/2 cannot close
      const double B = 0.25 * f0 * std::sin(b) / cb;
      AngularProfile p = assemble(f0, g0, N, a, b, B);
      if (interface_defect(p) > 1e-9 || !signs_hold(p)) continue;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::optional<AngularProfile> shooting_oracle(double f0, double g0, double phi0, double dphi0,
                                              const ShootingOptions& opt) {
  if (phi0 == 0.0 && dphi0 == 0.0) return std::nullopt;
  using State = Eigen::Vector2d;
  auto rhs = [&](const State& y, bool pos) {
    return State(y[1], -4.0 * y[0] + (pos ? -f0 : g0));
  };
  auto rk4 = [&](const State& y, double h, bool pos) {
    const State k1 = rhs(y, pos);
    const State k2 = rhs(y + 0.5 * h * k1, pos);
    const State k3 = rhs(y + 0.5 * h * k2, pos);
    const State k4 = rhs(y + h * k3, pos);
    return State(y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
  };
  auto crossed = [](double v, bool pos) { return pos ? v <= 0 : v > 0; };

  bool pos = phi0 > 0 || (phi0 == 0 && dphi0 > 0);
  State y(phi0, dphi0);
  std::vector<double> events;
  if (phi0 == 0.0) events.push_back(0.0);
  std::vector<std::pair<double, double>> samples;  // (theta, phi)
  const double H = kTwoPi / opt.steps;
  double theta = 0;
  samples.emplace_back(theta, y[0]);
  for (int k = 0; k < opt.steps; ++k) {
    double remaining = (k == opt.steps - 1) ? kTwoPi - theta : H;
    while (remaining > 0) {
      const State trial = rk4(y, remaining, pos);
      if (!crossed(trial[0], pos)) {
        y = trial;
        theta += remaining;
        break;
      }
      double lo = 0, hi = remaining;
      while (hi - lo > opt.event_tol) {
        const double mid = 0.5 * (lo + hi);
        (crossed(rk4(y, mid, pos)[0], pos) ? hi : lo) = mid;
      }
      y = rk4(y, hi, pos);
      y[0] = 0.0;
      theta += hi;
      remaining -= hi;
      if (theta < kTwoPi - 1e-10) events.push_back(theta);
      pos = !pos;
    }
    samples.emplace_back(theta, y[0]);
  }
  if (std::abs(y[0] - phi0) > opt.period_tol || std::abs(y[1] - dphi0) > opt.period_tol) return std::nullopt;
  if (events.size() < 2) return std::nullopt;

  AngularProfile p{f0, g0, {}, false};
  const std::size_t n = events.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double start = events[i];
    const double end = i + 1 < n ? events[i + 1] : events[0] + kTwoPi;
    const double mid = wrap_angle(0.5 * (start + end));
    // Sign of the component from the sample nearest its midpoint.
    const auto it = std::min_element(samples.begin(), samples.end(), [&](const auto& a, const auto& b) {
      return std::abs(a.first - mid) < std::abs(b.first - mid);
    });
    Component c{it->second > 0 ? Sign::positive : Sign::negative, end - start, 0, start};
    // Least-squares fit of B from the samples inside the component.
    const double quad = c.sign == Sign::positive ? -0.5 * f0 : 0.5 * g0;
    double num = 0, den = 0;
    for (const auto& [t, v] : samples) {
      const double u = wrap_angle(t - start);
      if (u <= 0 || u >= c.length) continue;
      const double s2 = std::sin(2 * u);
      const double s = std::sin(u);
      num += (v - quad * s * s) * s2;
      den += s2 * s2;
    }
    c.coefficient = den > 0 ? num / den : 0;
    p.components.push_back(c);
  }
  return p;
}

MatchResult match_blowup(const std::vector<double>& trace, const std::vector<AngularProfile>& catalogue) {
  if (catalogue.empty()) throw InvalidArgument("empty catalogue");
  if (trace.size() < 64) throw InvalidArgument("trace needs at least 64 samples");
  const int M = static_cast<int>(trace.size());
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(trace.data(), M);
  if (t.norm() == 0) throw DegenerateInput("zero trace");
  t.normalize();
  auto angles = [&](int i) { return kTwoPi * i / M; };

  auto samples = [&](const AngularProfile& p, double omega, Eigen::VectorXd* deriv) {
    Eigen::VectorXd v(M);
    if (deriv) deriv->resize(M);
    for (int i = 0; i < M; ++i) {
      const double th = wrap_angle(angles(i) - omega);
      v[i] = evaluate_profile(p, th);
      if (deriv) (*deriv)[i] = -evaluate_profile_derivative(p, th);
    }
    return v;
  };
  auto dist2 = [&](const AngularProfile& p, double omega) {
    const Eigen::VectorXd v = samples(p, omega, nullptr);
    return (t - v / v.norm()).squaredNorm();
  };
  auto slope = [&](const AngularProfile& p, double omega) {
    Eigen::VectorXd dv;
    const Eigen::VectorXd v = samples(p, omega, &dv);
    const double nv = v.norm();
    const Eigen::VectorXd u = v / nv;
    const Eigen::VectorXd du = (dv - u * u.dot(dv)) / nv;
    return -2.0 * t.dot(du);
  };

  MatchResult best{0, 0, std::numeric_limits<double>::infinity()};
  const int grid = 4096;
  for (std::size_t k = 0; k < catalogue.size(); ++k) {
    const AngularProfile& p = catalogue[k];
    double w0 = 0, d0 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j) {
      const double w = kTwoPi * j / grid;
      const double d = dist2(p, w);
      if (d < d0) {
        d0 = d;
        w0 = w;
      }
    }
    // Golden-section refinement to 1e-6 within one grid cell either side.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = w0 - kTwoPi / grid, b = w0 + kTwoPi / grid;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dist2(p, c), fd = dist2(p, d);
    while (b - a > 1e-6) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = dist2(p, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = dist2(p, d);
      }
    }
    // Polish on the analytic slope of the distance (secant steps inside the bracket).
    double w = 0.5 * (a + b);
    double lo = a - 1e-6, hi = b + 1e-6;
    double slo = slope(p, lo), shi = slope(p, hi);
    if ((slo < 0) != (shi < 0)) {
      for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        double x = lo - slo * (hi - lo) / (shi - slo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double sx = slope(p, x);
        if (sx == 0) {
          lo = hi = x;
          break;
        }
        if ((sx < 0) == (slo < 0)) {
          lo = x;
          slo = sx;
        } else {
          hi = x;
          shi = sx;
        }
        if (it % 3 == 2) {  // guard against one-sided secant stagnation
          const double mid = 0.5 * (lo + hi);
          const double sm = slope(p, mid);
          if ((sm < 0) == (slo < 0)) {
            lo = mid;
            slo = sm;
          } else {
            hi = mid;
            shi = sm;
          }
        }
      }
      const double cand = 0.5 * (lo + hi);
      if (dist2(p, cand) <= dist2(p, w)) w = cand;
    }
    const double err = std::sqrt(std::max(0.0, dist2(p, w)));
    if (err < best.error) {
      const double period = 2.0 * kTwoPi / std::max(2, p.N());
      best = {k, std::fmod(wrap_angle(w), period), err};
    }
  }
  return best;
}

double planar_residual_rms(const AngularProfile& p, int n) {
  const double h = 2.0 / n;
  auto eta = [&](double x, double y) {
    const double r2 = x * x + y * y;
    return r2 * evaluate_profile(p, wrap_angle(std::atan2(y, x)));
  };
  const std::vector<double> rays = p.interface_angles();
  double acc = 0;
  long count = 0;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      const double x = -1 + (i + 0.5) * h, y = -1 + (j + 0.5) * h;
      const double r = std::hypot(x, y);
      if (r < 3 * h) continue;
      const double th = std::atan2(y, x);
      bool near = false;
      for (double ray : rays) {
        const double c = std::cos(th - ray), s = std::sin(th - ray);
        const double dist = c > 0 ? r * std::abs(s) : r;
        if (dist < 3 * h) near = true;
      }
      if (near) continue;
      const double e = eta(x, y);
      const double lap = (eta(x + h, y) + eta(x - h, y) + eta(x, y + h) + eta(x, y - h) - 4 * e) / (h * h);
      const double rhs = e > 0 ? p.f0 : -p.g0;
      acc += (-lap - rhs) * (-lap - rhs);
      ++count;
    }
  return count ? std::sqrt(acc / count) : 0.0;
}

double gradient_nondegeneracy(const AngularProfile& p, int samples) {
  double c = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double th = kTwoPi * k / samples;
    const double v = evaluate_profile(p, th), dv = evaluate_profile_derivative(p, th);
    c = std::min(c, std::sqrt(4 * v * v + dv * dv));
  }
  return c;
}

}  // namespace bblab
