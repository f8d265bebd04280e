#pragma once

#include <string>
#include <vector>

#include "bblab/planar.hpp"

namespace bblab {

struct WeissOptions {
  int n_theta = 256;
  int min_radial = 32;
  double radial_per_h = 4.0;  // radial nodes = max(min_radial, ceil(radial_per_h r / h))
  double beta = 0.5;
};

struct WeissProfile {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<double> radii;             // strictly decreasing
  std::vector<double> psi;
  std::vector<double> boundary_mass;     // S(r)
  std::vector<double> dirichlet;         // int |grad eta_r|^2, boundary form via Green's identity
  std::vector<double> bulk;              // int f (eta_r)_+ + g (eta_r)_-
  std::vector<Eigen::VectorXd> traces;   // eta_r on the unit circle, n_theta samples
  double C = 0;
  double beta = 0.5;
  double h = 0;                          // sampler spacing

  double W(std::size_t k) const;
};

// Psi(r) = int_B |grad eta_r|^2 - 2 int_B f_r (eta_r)_+ + g_r (eta_r)_- - 2 int_dB eta_r^2,
// eta_r = eta(x0 + r .)/r^2, by polar midpoint quadrature.
WeissProfile weiss_profile(const PlanarField& eta, const PlanarField& f, const PlanarField& g,
                           const Eigen::Vector2d& x0, const std::vector<double>& radii,
                           const WeissOptions& options = {});

// Smallest C >= 0 making Psi(r) + C r^beta nondecreasing in r along the samples.
double fit_envelope(const std::vector<double>& radii, const std::vector<double>& psi, double beta);

struct EnvelopeViolation {
  double r = 0;
  double s = 0;
  double lhs = 0;  // W(s) - W(r)
  double rhs = 0;  // c0 int (eta_s - eta_r)^2 - slack
  double magnitude = 0;
};

// For sampled pairs r < s < 2r checks W(s) - W(r) >= c0 int_dB (eta_s - eta_r)^2 - slack.
std::vector<EnvelopeViolation> envelope_check(const WeissProfile& profile, double C, double beta,
                                              double slack, double c0 = 1.0);

enum class BlowupRegime { finite_psi, minus_infinity };
std::string to_string(BlowupRegime r);

struct BlowupSequence {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<double> radii;
  std::vector<Eigen::MatrixXd> fields;   // (n_theta x n_rad) polar samples of the (normalized) rescalings
  std::vector<double> boundary_mass;     // S(r_k) before normalization
  std::vector<double> l2_norm;           // ||eta_r||_{L2(B1)} before normalization
  bool normalized = false;
  BlowupRegime regime = BlowupRegime::finite_psi;
  std::vector<double> limit_candidate;   // angular trace at |x| = 1/2 of the last iterate
  double cauchy_defect = 0;              // L2(B1) distance of the last two rescalings
  double growth_factor = 0;              // S(r_min) / S(r_max)
};

struct BlowupOptions {
  int n_theta = 256;
  int n_rad = 32;
  double growth_threshold = 2.0;
};

BlowupSequence extract_blowup(const PlanarField& eta, const Eigen::Vector2d& x0, const std::vector<double>& r_seq,
                              const BlowupOptions& options = {});

// ||eta_r||_{L2(B1)} / D^{(d+4)/(2d)} for the finest rescaling.
double nondegeneracy_ratio(const BlowupSequence& blowup, double density, int d);

struct CriticalPoint {
  Index cell = 0;
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double value = 0;
  double gradient = 0;
};

// Cells with |eta| < eps1 and |grad eta| < eps2 (centered differences), defaults 10 h^2, 10 h.
std::vector<CriticalPoint> find_critical_points(const ScalarField& eta, double eps1 = -1, double eps2 = -1);

// min over interior patch cells of Lap_h(eta_+ + M |x - x0|^2), M = max(|f|,|g|)_inf / 2.
double subharmonicity_probe(const ScalarField& eta, const ScalarField& f, const ScalarField& g,
                            const Eigen::Vector2d& x0, double patch_radius);

}  // namespace bblab
