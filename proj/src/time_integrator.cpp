#include "rkdg/time_integrator.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rkdg {

int cfl_steps(double final_time, double h, double lambda, double k_cfl, double safety) {
  if (!(final_time > 0) || !(h > 0) || !(lambda > 0) || !(k_cfl > 0) || !(safety > 0)) {
    throw std::invalid_argument("cfl_steps: arguments must be positive");
  }
  const double ratio = final_time * lambda / (safety * k_cfl * h);
  // Guard against ratios that are integers up to rounding.
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * rounded) return std::max(1, static_cast<int>(rounded));
  return std::max(1, static_cast<int>(std::ceil(ratio)));
}

std::pair<double, double> state_norms(const DGOperator& op, const Eigen::VectorXd& state) {
  const auto block = static_cast<Eigen::Index>(op.num_elements()) * op.num_modes();
  const auto& m = op.mass_diag();
  const auto rho = state.segment(0, block);
  const double p2 = rho.cwiseAbs2().dot(m.segment(0, block));
  const double u2 = state.segment(block, 2 * block).cwiseAbs2().dot(m.segment(block, 2 * block));
  const double c2 = op.sound_speed() * op.sound_speed();
  return {c2 * std::sqrt(p2), std::sqrt(u2)};
}

RunResult run(const Mesh& mesh, const ElementSpace& space, const DGOperator& op, BoundaryModel& boundary,
              Eigen::VectorXd initial, const TimeLoopConfig& config) {
  if (config.steps < 1 || !(config.final_time > 0)) throw std::invalid_argument("run: need steps >= 1 and T > 0");
  if (initial.size() != op.state_size()) throw std::invalid_argument("run: initial state has the wrong size");

  const int ne = op.num_elements();
  const int n = op.num_modes();
  const double c2 = op.sound_speed() * op.sound_speed();

  struct ProbeEval {
    int element;
    Eigen::RowVectorXd phi;
  };
  std::vector<ProbeEval> probes;
  for (const auto& probe : config.probes) {
    const int e = locate_element(mesh, probe.point);
    if (e < 0) {
      throw ConfigError("probe '" + probe.name + "' at (" + std::to_string(probe.point.x()) + ", " +
                        std::to_string(probe.point.y()) + ") is outside the mesh");
    }
    probes.push_back({e, space.evaluate(affine_map(mesh, e).to_reference(probe.point))});
  }

  RunResult result;
  result.steps = config.steps;
  result.dt = config.final_time / config.steps;
  result.times.reserve(static_cast<std::size_t>(config.steps) + 1);
  result.probe_pressure.setZero(config.steps + 1, static_cast<Eigen::Index>(probes.size()));

  Eigen::VectorXd y = std::move(initial);
  const auto record_probes = [&](int step) {
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const auto& pr = probes[k];
      result.probe_pressure(step, static_cast<Eigen::Index>(k)) =
          c2 * pr.phi.dot(y.segment(static_cast<Eigen::Index>(pr.element) * n, n));
    }
  };
  const auto record_norms = [&](double t) {
    const auto [pn, un] = state_norms(op, y);
    result.norm_times.push_back(t);
    result.pressure_norm.push_back(pn);
    result.velocity_norm.push_back(un);
  };

  Eigen::Matrix3Xd traces;
  Eigen::VectorXd phi;
  const bool stage_filters = boundary.has_per_stage_filters();
  const bool step_filters = boundary.has_filters();
  const auto rhs = [&](double t, const Eigen::VectorXd& state, Eigen::VectorXd& out) {
    op.boundary_traces(state, traces);
    if (stage_filters) boundary.update_filters(traces, true);
    boundary.flux_values(traces, t, phi);
    op.apply_rhs(state, phi, out);
  };

  result.times.push_back(0.0);
  record_probes(0);
  record_norms(0.0);
  if (config.snapshot && config.snapshot_every > 0) config.snapshot(0, 0.0, y);

  Rk4Workspace<Eigen::VectorXd> ws;
  const auto start = std::chrono::steady_clock::now();
  const double dt = result.dt;
  for (int step = 1; step <= config.steps; ++step) {
    const double t0 = (step - 1) * dt;
    const double t1 = step * dt;
    try {
      rk4_step(rhs, y, t0, dt, ws);
      check_state(y, ne, n, config.blowup_limit);
    } catch (const BlowUpError& err) {
      result.blowup = "step " + std::to_string(step) + ", t = " + std::to_string(t1) + ": " + err.what();
      break;
    }
    if (step_filters) {
      op.boundary_traces(y, traces);
      boundary.update_filters(traces, false);
    }
    result.completed_steps = step;
    result.times.push_back(t1);
    record_probes(step);
    if ((config.norm_every > 0 && step % config.norm_every == 0) || step == config.steps) record_norms(t1);
    if (config.log && config.progress_every > 0 && (step % config.progress_every == 0 || step == config.steps)) {
      const auto [pn, un] = state_norms(op, y);
      *config.log << "step " << step << "/" << config.steps << "  t = " << t1 << "  |p| = " << pn
                  << "  |u| = " << un << "\n";
      config.log->flush();
    }
    if (config.snapshot && config.snapshot_every > 0 &&
        (step % config.snapshot_every == 0 || step == config.steps)) {
      config.snapshot(step, t1, y);
    }
  }
  result.loop_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.blowup) {
    result.probe_pressure.conservativeResize(result.completed_steps + 1, Eigen::NoChange);
  }
  result.state = std::move(y);
  return result;
}

}  // namespace rkdg
