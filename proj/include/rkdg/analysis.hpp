#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkdg/background.hpp"
#include "rkdg/basis.hpp"
#include "rkdg/mesh.hpp"

namespace rkdg {

/// Plane burst entering through x = 0: u = -A sin(2 pi f (t - x/c)) on the
/// band c (t - cycles/f) <= x <= c t, v = 0, rho = rho_bar u / c.
struct PlaneWave {
  double amplitude = 1e-3;
  double frequency = 1e6;
  double cycles = 5.0;
  double sound_speed = 1481.0;
  double rho_bar = 997.0;

  /// Positions of the leading and trailing fronts at time t.
  std::vector<double> fronts(double t) const;
};

struct ExactSample {
  double rho = 0.0;
  double u = 0.0;
  double v = 0.0;
  Eigen::Vector2d grad_u = Eigen::Vector2d::Zero();
};

ExactSample plane_wave_exact(const PlaneWave& wave, double x, double y, double t);

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;            // sqrt(L2^2 + |grad|^2)
  double excluded_area = 0.0;  // quadrature measure skipped near fronts
  double total_area = 0.0;
};

/// L2 and H1 errors of the horizontal velocity against `exact`, using a
/// triangle rule of exactness 2P + 2. Quadrature nodes whose x coordinate
/// lies within `band` of any entry of `fronts` are skipped.
ErrorNorms velocity_error_norms(const Mesh& mesh, const ElementSpace& space, const Eigen::VectorXd& state,
                                const std::function<ExactSample(const Eigen::Vector2d&)>& exact,
                                const std::vector<double>& fronts = {}, double band = 0.0);

/// Exclusion half-width used for the plane-wave error: one node spacing
/// h / P of an order-P element.
inline double node_spacing(double h, int order) { return h / order; }

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Mean of the background x velocity along the segment a -> b (Gauss-Legendre).
double path_average_velocity(const BackgroundFlow& flow, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             int points = 12, int segments = 16);

struct TransitEstimate {
  double lag_samples = 0.0;  // backward arrival minus forward arrival
  double delta_t = 0.0;
  double velocity = 0.0;
  double peak = 0.0;
  double secondary_peak = 0.0;
  bool ambiguous = false;
};

/// Cross-correlates forward and backward receiver signals sampled every
/// `dt`, refines the peak lag by a parabola through its neighbors, and
/// returns v = c^2 delta_t / (2 dx). Flags an ambiguous peak when another
/// local maximum reaches 95% of it.
TransitEstimate transit_time_estimate(const Eigen::VectorXd& forward, const Eigen::VectorXd& backward, double dt,
                                      double dx, double c);

/// Seconds per mass-matrix inversion, the best of `repeats` timed batches.
double time_mass_inversion(const Eigen::VectorXd& mass_diag, int repeats = 20);

}  // namespace rkdg
