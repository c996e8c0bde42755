#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rkdg {

struct BoundaryQuadrature;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sine burst Phi = amplitude sin(2 pi f t) on 0 <= t <= cycles / f,
/// optionally restricted to support_min <= x[support_axis] <= support_max.
struct InletSpec {
  double amplitude = 1e-3;
  double frequency = 1e6;
  double cycles = 5.0;
  int support_axis = -1;  // -1: whole boundary patch
  double support_min = 0.0;
  double support_max = 0.0;
};

struct AbsorbingSpec {
  double alpha = 0.01;
  /// false: eta fixed at 1 (normal incidence assumed everywhere).
  bool filter = true;
  /// Update the filter after every stage instead of every step.
  bool per_stage = false;
};

struct ResistiveSpec {
  double rho_w = 1650.0;
  double c_w = 2800.0;
  double theta = 0.0;  // radians
};

enum class BoundaryKind { Inlet, Reflecting, Absorbing, Resistive };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Reflecting;
  InletSpec inlet;
  AbsorbingSpec absorbing;
  ResistiveSpec resistive;

  static BoundaryCondition reflecting() { return {}; }
  static BoundaryCondition make_inlet(const InletSpec& spec);
  static BoundaryCondition make_absorbing(const AbsorbingSpec& spec);
  static BoundaryCondition make_resistive(const ResistiveSpec& spec);
};

std::string to_string(BoundaryKind kind);

double inlet_profile(const InletSpec& spec, double x, double y, double t);
inline double inlet_profile(double x, double y, double t) { return inlet_profile(InletSpec{}, x, y, t); }

/// sqrt(max(c^2 - c_w^2 + c_w^2 cos^2 theta, 0)) rho c / (rho_w c_w).
double resistive_flux(double rho, double theta, double rho_w, double c_w, double c);

/// eta rho c / rho_bar.
double absorbing_flux(double rho, double eta, double c, double rho_bar);

/// Largest incidence angle with a transmitted wave; pi/2 when c_w <= c.
double critical_angle(double c, double c_w);

/// Exponentially filtered boundary velocity and its direction coefficient
/// eta = |u_hat . n| / |u_hat|.
struct FilterState {
  Eigen::Vector2d u_hat = Eigen::Vector2d::Zero();
  double eta = 1.0;
};

inline constexpr double kFilterSeed = 1e-10;

/// u_hat = seed * (inward normal), eta = 1.
FilterState filter_init(const Eigen::Vector2d& outward_normal, double magnitude = kFilterSeed);

/// u_hat <- (1 - alpha) u_hat + alpha sgn(u.n) u with sgn(0) = +1, then
/// eta <- |u_hat . n| / |u_hat| clamped to [0, 1]; eta is kept when u_hat
/// vanishes.
void filter_update(FilterState& state, const Eigen::Vector2d& u_trace, const Eigen::Vector2d& n, double alpha);

/// Boundary conditions by physical tag plus the per-point filter states.
class BoundaryModel {
 public:
  /// Throws ConfigError if a tag present on the boundary has no condition,
  /// a condition names a tag absent from the boundary, or parameters are out
  /// of range.
  BoundaryModel(std::map<int, BoundaryCondition> conditions, const BoundaryQuadrature& quadrature, double rho_bar,
                double c);

  const std::map<int, BoundaryCondition>& conditions() const { return conditions_; }
  const std::vector<FilterState>& filters() const { return filters_; }
  bool has_filters() const;
  bool has_per_stage_filters() const;

  /// Phi at every boundary quadrature point from the interior traces
  /// (rho, u1, u2) at time t.
  void flux_values(const Eigen::Matrix3Xd& traces, double t, Eigen::VectorXd& phi) const;

  /// Advances every absorbing filter with the velocity traces. When
  /// `stage` is true only per-stage filters move; otherwise only per-step
  /// filters move.
  void update_filters(const Eigen::Matrix3Xd& traces, bool stage = false);

  /// Resets all filter states to the seed.
  void reset_filters();

 private:
  std::map<int, BoundaryCondition> conditions_;
  const BoundaryQuadrature* quadrature_;
  double rho_bar_;
  double c_;
  std::vector<const BoundaryCondition*> point_condition_;
  std::vector<FilterState> filters_;
};

}  // namespace rkdg
