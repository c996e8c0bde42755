#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkdg/boundary.hpp"
#include "rkdg/dg_operator.hpp"

namespace rkdg {

/// Default CFL coefficient 1 / (2P + 1).
inline double default_cfl(int order) { return 1.0 / (2.0 * order + 1.0); }

/// Smallest M with lambda (T / M) / h <= safety * k_cfl.
int cfl_steps(double final_time, double h, double lambda, double k_cfl, double safety = 0.9);

template <typename Vector>
struct Rk4Workspace {
  Vector k{}, stage{}, acc{};
};

/// Classical four-stage Runge-Kutta step for y' = f(t, y); `rhs(t, y, out)`
/// writes f into `out`.
template <typename Vector, typename Rhs>
void rk4_step(const Rhs& rhs, Vector& y, double t, double dt, Rk4Workspace<Vector>& ws) {
  const double h2 = 0.5 * dt;
  rhs(t, y, ws.k);
  ws.acc = y + (dt / 6.0) * ws.k;
  ws.stage = y + h2 * ws.k;
  rhs(t + h2, ws.stage, ws.k);
  ws.acc = ws.acc + (dt / 3.0) * ws.k;
  ws.stage = y + h2 * ws.k;
  rhs(t + h2, ws.stage, ws.k);
  ws.acc = ws.acc + (dt / 3.0) * ws.k;
  ws.stage = y + dt * ws.k;
  rhs(t + dt, ws.stage, ws.k);
  y = ws.acc + (dt / 6.0) * ws.k;
}

template <typename Vector, typename Rhs>
void rk4_step(const Rhs& rhs, Vector& y, double t, double dt) {
  Rk4Workspace<Vector> ws;
  rk4_step(rhs, y, t, dt, ws);
}

struct Probe {
  std::string name;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
};

struct TimeLoopConfig {
  double final_time = 0.0;
  int steps = 0;
  std::vector<Probe> probes;
  /// Norm history cadence in steps (0: first and last only).
  int norm_every = 1;
  /// Progress lines to `log` every this many steps (0: silent).
  int progress_every = 0;
  std::ostream* log = nullptr;
  /// Called with (step, t, state) every `snapshot_every` steps and at the end.
  int snapshot_every = 0;
  std::function<void(int, double, const Eigen::VectorXd&)> snapshot;
  double blowup_limit = 1e12;
};

struct RunResult {
  Eigen::VectorXd state;
  int steps = 0;
  int completed_steps = 0;
  double dt = 0.0;
  std::vector<double> times;      // probe sample times, length steps + 1
  Eigen::MatrixXd probe_pressure;  // (steps + 1) x #probes
  std::vector<double> norm_times;
  std::vector<double> pressure_norm;
  std::vector<double> velocity_norm;
  double loop_seconds = 0.0;
  std::optional<std::string> blowup;
};

/// L2 norms over the domain of p = c^2 rho and of |u|.
std::pair<double, double> state_norms(const DGOperator& op, const Eigen::VectorXd& state);

/// M uniform RK4 steps from `initial`; filters advance once per step with
/// the end-of-step traces. A blow-up stops the loop and is reported in the
/// result together with everything recorded so far.
RunResult run(const Mesh& mesh, const ElementSpace& space, const DGOperator& op, BoundaryModel& boundary,
              Eigen::VectorXd initial, const TimeLoopConfig& config);

}  // namespace rkdg
