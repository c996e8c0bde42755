#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rkdg/analysis.hpp"
#include "rkdg/background.hpp"
#include "rkdg/basis.hpp"
#include "rkdg/boundary.hpp"
#include "rkdg/config.hpp"
#include "rkdg/dg_operator.hpp"
#include "rkdg/mesh.hpp"
#include "rkdg/time_integrator.hpp"

namespace rkdg {

Mesh make_mesh(const SimConfig& config);
BackgroundFlow make_background(const SimConfig& config);

/// Plane burst matching the first inlet boundary of the config.
PlaneWave plane_wave_for(const SimConfig& config);

/// Everything needed to time-step one configuration.
struct Problem {
  SimConfig config;
  Mesh mesh;
  EdgeConnectivity connectivity;
  std::unique_ptr<ElementSpace> space;
  std::unique_ptr<BackgroundFlow> flow;
  std::unique_ptr<DGOperator> op;
  std::unique_ptr<BoundaryModel> boundary;
  double cfl_length = 0.0;
  double k_cfl = 0.0;
  int steps = 0;
  double setup_seconds = 0.0;

  double dt() const { return config.final_time / steps; }
  /// lambda dt / length, to be compared with k_cfl.
  double courant() const { return op->lambda_max() * dt() / cfl_length; }
};

Problem build_problem(const SimConfig& config);

Eigen::VectorXd initial_state(const Problem& problem);

struct SimulationResult {
  RunResult run;
  std::optional<ErrorNorms> error;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Runs the time loop; with `write_outputs` the probe, norm, field and
/// metadata files go to the configured output directory (also after a
/// blow-up).
SimulationResult run_problem(Problem& problem, bool write_outputs, std::ostream* log = nullptr);
SimulationResult run_config(const SimConfig& config, bool write_outputs, std::ostream* log = nullptr);

struct SweepRow {
  int order = 0;
  double h = 0.0;
  int elements = 0;
  Eigen::Index dofs = 0;
  int steps = 0;
  double dt = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double excluded_fraction = 0.0;
  double seconds = 0.0;
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::map<int, double> slopes;  // order -> least-squares H1 slope
};

/// Runs every (P, h) cell of a rectangle-generator config with the
/// plane-wave error enabled.
SweepResult convergence_sweep(const SimConfig& base, const std::vector<double>& hs, const std::vector<int>& orders,
                              std::ostream* log = nullptr);

void write_rate_table(const SweepResult& sweep, const std::filesystem::path& path);

struct TransitResult {
  TransitEstimate estimate;
  double dx = 0.0;
  double path_average = 0.0;
  double relative_error = 0.0;
  double dt = 0.0;
  Eigen::VectorXd forward;
  Eigen::VectorXd backward;
};

/// Forward and backward runs followed by the cross-correlation estimate at
/// the receiver probe named in the forward config.
TransitResult transit(const SimConfig& forward, const SimConfig& backward, bool write_outputs,
                      std::ostream* log = nullptr);

}  // namespace rkdg
