#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace bblab {

enum class Sign { positive, negative };

struct Component {
  Sign sign = Sign::negative;
  double length = 0;
  double coefficient = 0;  // B_s
  double start = 0;        // theta_{0,s}
};

// 2-homogeneous angular profile phi solving -phi'' - 4 phi = f0 1{phi>0} - g0 1{phi<=0}.
// Components are listed counterclockwise starting at components.front().start.
struct AngularProfile {
  double f0 = 1;
  double g0 = 0;
  std::vector<Component> components;
  bool degenerate_family = false;

  int N() const { return static_cast<int>(components.size()); }
  std::vector<double> interface_angles() const;
};

// Enumerates admissible profiles with at most N_max sign components (one per
// rotation class). C^1 matching at interfaces forces f0 tan|I_+| = g0 tan|I_-|.
std::vector<AngularProfile> classify_profiles(double f0, double g0, int N_max);

// theta in [0, 2 pi); throws AngleOutOfRange otherwise.
double evaluate_profile(const AngularProfile& p, double theta);
double evaluate_profile_derivative(const AngularProfile& p, double theta);

// Same profile with every start angle advanced by omega.
AngularProfile rotate(const AngularProfile& p, double omega);

// Largest interface mismatch (value and slope jump) of the assembled profile;
// zero for an exact profile.
double interface_defect(const AngularProfile& p);

struct ShootingOptions {
  int steps = 8192;          // fixed RK4 steps over [0, 2 pi]
  double event_tol = 1e-12;  // bisection tolerance on interface angles
  double period_tol = 1e-9;
};

// Integrates the profile ODE from (phi0, dphi0) at theta = 0; returns a profile iff
// the data return to their initial values at 2 pi.
std::optional<AngularProfile> shooting_oracle(double f0, double g0, double phi0, double dphi0,
                                              const ShootingOptions& options = {});

struct MatchResult {
  std::size_t index = 0;
  double rotation = 0;  // modulo the profile's symmetry period
  double error = 0;     // Euclidean distance of the unit-normalized samples
};

// trace[i] is sampled at theta_i = 2 pi i / trace.size().
MatchResult match_blowup(const std::vector<double>& trace, const std::vector<AngularProfile>& catalogue);

// RMS of -Lap_h(r^2 phi) - (f0 1{>0} - g0 1{<=0}) on an n x n patch of [-1,1]^2,
// excluding cells within 3h of interface rays and the origin.
double planar_residual_rms(const AngularProfile& p, int n = 256);

// min over theta of |grad(r^2 phi)| / r = sqrt(4 phi^2 + phi'^2).
double gradient_nondegeneracy(const AngularProfile& p, int samples = 8192);

}  // namespace bblab
