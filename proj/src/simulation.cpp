#include "rkdg/simulation.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rkdg/export.hpp"

namespace rkdg {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Mesh make_mesh(const SimConfig& config) {
  if (config.rectangle) return rectangle_mesh(resolved_rectangle(config));
  return load_gmsh(config.mesh_path);
}

BackgroundFlow make_background(const SimConfig& c) {
  switch (c.background.kind) {
    case BackgroundKind::Poiseuille:
      return BackgroundFlow::poiseuille(c.rho_bar, c.sound_speed, c.background.u_max, c.background.radius,
                                        c.background.viscosity);
    case BackgroundKind::Gridded:
      return BackgroundFlow(c.rho_bar, c.sound_speed, read_background_csv(c.background.file));
    case BackgroundKind::Rest:
      break;
  }
  return BackgroundFlow::rest(c.rho_bar, c.sound_speed);
}

PlaneWave plane_wave_for(const SimConfig& c) {
  PlaneWave w;
  w.sound_speed = c.sound_speed;
  w.rho_bar = c.rho_bar;
  for (const auto& [tag, bc] : c.boundaries) {
    if (bc.kind == BoundaryKind::Inlet) {
      w.amplitude = bc.inlet.amplitude;
      w.frequency = bc.inlet.frequency;
      w.cycles = bc.inlet.cycles;
      break;
    }
  }
  return w;
}

Problem build_problem(const SimConfig& config) {
  validate_config(config);
  const auto start = Clock::now();
  Problem p;
  p.config = config;
  p.mesh = make_mesh(config);
  p.connectivity = build_connectivity(p.mesh);
  const int order = config.order;
  const int volume_order = config.volume_order > 0 ? config.volume_order : 2 * order + 1;
  p.space = std::make_unique<ElementSpace>(order, triangle_rule(volume_order));
  p.flow = std::make_unique<BackgroundFlow>(make_background(config));
  OperatorOptions opts;
  opts.edge_points = config.edge_points;
  opts.local_lambda = config.local_lambda;
  opts.lambda_override = config.lambda_override;
  p.op = std::make_unique<DGOperator>(p.mesh, p.connectivity, *p.space, *p.flow, opts);
  p.boundary = std::make_unique<BoundaryModel>(config.boundaries, p.op->boundary(), config.rho_bar, config.sound_speed);

  switch (config.cfl_length) {
    case CflLength::Inradius:
      p.cfl_length = p.mesh.min_inradius();
      break;
    case CflLength::Nominal:
      p.cfl_length = p.mesh.nominal_h > 0 ? p.mesh.nominal_h : p.mesh.min_altitude();
      break;
    case CflLength::MinAltitude:
      p.cfl_length = p.mesh.min_altitude();
      break;
    case CflLength::Circumdiameter:
      p.cfl_length = p.mesh.max_circumdiameter();
      break;
  }
  p.k_cfl = config.k_cfl.value_or(default_cfl(order));
  p.steps = config.steps > 0
                ? config.steps
                : cfl_steps(config.final_time, p.cfl_length, p.op->lambda_max(), p.k_cfl, config.safety);
  p.setup_seconds = seconds_since(start);
  return p;
}

Eigen::VectorXd initial_state(const Problem& p) {
  const auto& init = p.config.initial;
  if (init.kind == InitialKind::Zero) return Eigen::VectorXd::Zero(p.op->state_size());
  return project(p.mesh, *p.space, [&init](const Eigen::Vector2d& x) {
    const double r2 = (x - init.center).squaredNorm() / (init.width * init.width);
    return Eigen::Vector3d(init.amplitude * std::exp(-r2), 0.0, 0.0);
  });
}

SimulationResult run_problem(Problem& p, bool write_outputs, std::ostream* log) {
  const auto& cfg = p.config;
  const auto& dir = cfg.output.dir;
  const int subdivision = cfg.output.subdivision > 0 ? cfg.output.subdivision : cfg.order;

  if (log && p.op->supersonic_points() > 0) {
    *log << "warning: background speed reaches the sound speed at " << p.op->supersonic_points()
         << " quadrature points\n";
  }
  if (log && cfg.steps > 0 && p.courant() > p.k_cfl) {
    *log << "warning: lambda dt / h = " << p.courant() << " exceeds k_cfl = " << p.k_cfl << "\n";
  }
  if (write_outputs) {
    std::filesystem::create_directories(dir);
    if (cfg.output.dump_operator) write_matrix_market(p.op->assemble_interior(), dir / "operator.mtx");
  }

  TimeLoopConfig loop;
  loop.final_time = cfg.final_time;
  loop.steps = p.steps;
  loop.probes = cfg.probes;
  loop.norm_every = cfg.output.norm_every;
  loop.progress_every = cfg.output.progress_every;
  loop.log = log;
  if (write_outputs && cfg.output.vtk_every > 0) {
    loop.snapshot_every = cfg.output.vtk_every;
    loop.snapshot = [&](int step, double, const Eigen::VectorXd& state) {
      std::ostringstream name;
      name << "field_" << std::setw(6) << std::setfill('0') << step << ".vtk";
      export_fields(state, p.mesh, *p.space, cfg.sound_speed, dir / name.str(), subdivision);
    };
  }

  p.boundary->reset_filters();
  SimulationResult out;
  out.run = run(p.mesh, *p.space, *p.op, *p.boundary, initial_state(p), loop);
  const auto& r = out.run;

  if (cfg.exact_error && !r.blowup) {
    const auto wave = plane_wave_for(cfg);
    const double t = cfg.final_time;
    const double h = p.mesh.nominal_h > 0 ? p.mesh.nominal_h : p.mesh.max_circumdiameter();
    out.error = velocity_error_norms(
        p.mesh, *p.space, r.state,
        [&](const Eigen::Vector2d& x) { return plane_wave_exact(wave, x.x(), x.y(), t); }, wave.fronts(t),
        node_spacing(h, cfg.order));
  }

  const auto& mesh = p.mesh;
  auto& md = out.metadata;
  md = {
      {"config", cfg.source.string()},
      {"config_version", std::to_string(kConfigVersion)},
      {"config_hash", cfg.hash_hex()},
      {"mesh_source", cfg.rectangle ? "rectangle generator" : cfg.mesh_path.string()},
      {"mesh_vertices", std::to_string(mesh.num_vertices())},
      {"mesh_elements", std::to_string(mesh.num_elements())},
      {"mesh_internal_edges", std::to_string(p.connectivity.internal_edges.size())},
      {"mesh_boundary_edges", std::to_string(p.connectivity.boundary_edges.size())},
      {"mesh_nominal_h", fmt(mesh.nominal_h)},
      {"mesh_max_circumdiameter", fmt(mesh.max_circumdiameter())},
      {"mesh_min_altitude", fmt(mesh.min_altitude())},
      {"mesh_min_inradius", fmt(mesh.min_inradius())},
      {"order", std::to_string(cfg.order)},
      {"modes_per_element", std::to_string(p.space->num_modes())},
      {"dofs", std::to_string(p.op->state_size())},
      {"volume_quadrature_order", std::to_string(p.space->rule().order)},
      {"edge_quadrature_points", std::to_string(p.op->traces().rule.size())},
      {"sound_speed", fmt(cfg.sound_speed)},
      {"rho_bar", fmt(cfg.rho_bar)},
      {"lambda_max", fmt(p.op->lambda_max())},
      {"lambda_mode", cfg.lambda_override ? "override" : (cfg.local_lambda ? "local" : "global")},
      {"cfl_length_kind", to_string(cfg.cfl_length)},
      {"cfl_length", fmt(p.cfl_length)},
      {"k_cfl", fmt(p.k_cfl)},
      {"cfl_safety", fmt(cfg.safety)},
      {"courant", fmt(p.courant())},
      {"final_time", fmt(cfg.final_time)},
      {"steps", std::to_string(p.steps)},
      {"completed_steps", std::to_string(r.completed_steps)},
      {"dt", fmt(r.dt)},
      {"operator_self_blocks", std::to_string(p.op->self_blocks().num_blocks())},
      {"operator_bytes", std::to_string(p.op->storage_bytes())},
      {"peak_memory_estimate_bytes",
       std::to_string(p.op->storage_bytes() +
                      static_cast<std::size_t>(p.op->state_size()) * sizeof(double) * 8)},
      {"time_setup_s", fmt(p.setup_seconds)},
      {"time_assembly_s", fmt(p.op->assembly_seconds())},
      {"time_mass_inversion_s", fmt(p.op->mass_inversion_seconds())},
      {"time_step_loop_s", fmt(r.loop_seconds)},
      {"final_pressure_norm", fmt(r.pressure_norm.empty() ? 0.0 : r.pressure_norm.back())},
      {"status", r.blowup ? "blow-up: " + *r.blowup : "ok"},
  };
  if (out.error) {
    md.emplace_back("error_l2", fmt(out.error->l2));
    md.emplace_back("error_h1", fmt(out.error->h1));
    md.emplace_back("error_excluded_area", fmt(out.error->excluded_area));
    md.emplace_back("error_total_area", fmt(out.error->total_area));
  }

  if (write_outputs) {
    ProbeTable table;
    for (const auto& probe : cfg.probes) table.names.push_back(probe.name);
    table.times = r.times;
    table.values = r.probe_pressure;
    export_probes(table, dir / "probes.csv");
    write_csv(dir / "norms.csv", {"t", "pressure_l2", "velocity_l2"}, {r.norm_times, r.pressure_norm, r.velocity_norm});
    if (cfg.output.final_vtk) export_fields(r.state, p.mesh, *p.space, cfg.sound_speed, dir / "field_final.vtk", subdivision);
    write_metadata(dir / "metadata.txt", md);
  }
  return out;
}

SimulationResult run_config(const SimConfig& config, bool write_outputs, std::ostream* log) {
  auto problem = build_problem(config);
  return run_problem(problem, write_outputs, log);
}

SweepResult convergence_sweep(const SimConfig& base, const std::vector<double>& hs, const std::vector<int>& orders,
                              std::ostream* log) {
  if (!base.rectangle) throw ConfigError("sweep needs a rectangle-generator mesh so h can be varied");
  SweepResult result;
  for (int order : orders) {
    std::vector<double> xs, ys;
    for (double h : hs) {
      SimConfig cfg = base;
      set_config_value(cfg, "space.order", std::to_string(order));
      std::ostringstream hv;
      hv << std::setprecision(17) << h;
      set_config_value(cfg, "mesh.h", hv.str());
      cfg.exact_error = true;
      cfg.probes.clear();
      SweepRow row;
      row.order = order;
      const auto start = Clock::now();
      auto problem = build_problem(cfg);
      row.h = problem.mesh.nominal_h;
      row.elements = problem.mesh.num_elements();
      row.dofs = problem.op->state_size();
      row.steps = problem.steps;
      row.dt = problem.dt();
      const auto sim = run_problem(problem, false, nullptr);
      row.seconds = seconds_since(start);
      row.diverged = sim.run.blowup.has_value();
      if (sim.error) {
        row.l2 = sim.error->l2;
        row.h1 = sim.error->h1;
        row.excluded_fraction = sim.error->excluded_area / sim.error->total_area;
        xs.push_back(row.h);
        ys.push_back(row.h1);
      }
      if (log) {
        *log << "P=" << order << " h=" << row.h << " elements=" << row.elements << " steps=" << row.steps
             << " H1=" << row.h1 << " L2=" << row.l2 << " time=" << row.seconds << "s"
             << (row.diverged ? " DIVERGED" : "") << "\n";
        log->flush();
      }
      result.rows.push_back(row);
    }
    if (xs.size() >= 2) result.slopes[order] = loglog_slope(xs, ys);
  }
  return result;
}

void write_rate_table(const SweepResult& sweep, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << "order,h,elements,dofs,steps,dt,l2_error,h1_error,excluded_fraction,seconds,status,slope\n";
  out << std::setprecision(10);
  for (const auto& row : sweep.rows) {
    const auto it = sweep.slopes.find(row.order);
    out << row.order << "," << row.h << "," << row.elements << "," << row.dofs << "," << row.steps << "," << row.dt
        << "," << row.l2 << "," << row.h1 << "," << row.excluded_fraction << "," << row.seconds << ","
        << (row.diverged ? "diverged" : "ok") << ",";
    if (it != sweep.slopes.end()) out << it->second;
    out << "\n";
  }
  if (!out) throw std::ios_base::failure("error writing " + path.string());
}

TransitResult transit(const SimConfig& forward, const SimConfig& backward, bool write_outputs, std::ostream* log) {
  for (const auto* cfg : {&forward, &backward}) {
    if (cfg->transit.receiver.empty()) throw ConfigError(cfg->source.string() + ": transit.receiver is required");
  }
  if (!forward.transit.has_path) throw ConfigError(forward.source.string() + ": transit.path is required");

  const auto receiver_signal = [&](const SimConfig& cfg, const char* label) {
    auto problem = build_problem(cfg);
    if (log) *log << label << ": " << problem.mesh.num_elements() << " elements, " << problem.steps << " steps\n";
    auto sim = run_problem(problem, write_outputs, log);
    if (sim.run.blowup) throw BlowUpError(std::string(label) + " run: " + *sim.run.blowup, -1);
    std::size_t k = 0;
    while (cfg.probes[k].name != cfg.transit.receiver) ++k;
    return std::make_pair(Eigen::VectorXd(sim.run.probe_pressure.col(static_cast<Eigen::Index>(k))), sim.run.dt);
  };
  auto [fwd, dt_f] = receiver_signal(forward, "forward");
  auto [bwd, dt_b] = receiver_signal(backward, "backward");
  if (fwd.size() != bwd.size() || std::abs(dt_f - dt_b) > 1e-15 * dt_f) {
    throw ConfigError("forward and backward runs must share the time grid");
  }

  const auto& ts = forward.transit;
  for (Eigen::Index i = 0; i < fwd.size(); ++i) {
    const double t = static_cast<double>(i) * dt_f;
    if (t < ts.window_start || t > ts.window_end) {
      fwd(i) = 0.0;
      bwd(i) = 0.0;
    }
  }

  TransitResult out;
  out.dt = dt_f;
  out.dx = ts.dx.value_or(std::abs(ts.path_end.x() - ts.path_start.x()));
  out.estimate = transit_time_estimate(fwd, bwd, dt_f, out.dx, forward.sound_speed);
  out.path_average = path_average_velocity(make_background(forward), ts.path_start, ts.path_end);
  out.relative_error = std::abs(out.estimate.velocity - out.path_average) / std::abs(out.path_average);
  out.forward = std::move(fwd);
  out.backward = std::move(bwd);

  if (write_outputs) {
    const auto dir = forward.output.dir;
    std::filesystem::create_directories(dir);
    write_metadata(dir / "transit.txt",
                   {{"forward_config", forward.source.string()},
                    {"backward_config", backward.source.string()},
                    {"receiver_forward", forward.transit.receiver},
                    {"receiver_backward", backward.transit.receiver},
                    {"path", fmt(ts.path_start.x()) + " " + fmt(ts.path_start.y()) + " " + fmt(ts.path_end.x()) + " " +
                                 fmt(ts.path_end.y())},
                    {"dx", fmt(out.dx)},
                    {"dt_step", fmt(out.dt)},
                    {"lag_samples", fmt(out.estimate.lag_samples)},
                    {"delta_t", fmt(out.estimate.delta_t)},
                    {"velocity_estimate", fmt(out.estimate.velocity)},
                    {"path_average_velocity", fmt(out.path_average)},
                    {"relative_error", fmt(out.relative_error)},
                    {"correlation_peak", fmt(out.estimate.peak)},
                    {"correlation_secondary_peak", fmt(out.estimate.secondary_peak)},
                    {"ambiguous_peak", out.estimate.ambiguous ? "true" : "false"}});
  }
  if (log && out.estimate.ambiguous) {
    *log << "warning: correlation peak is ambiguous (secondary peak within 5%)\n";
  }
  return out;
}

}  // namespace rkdg
