// dgsim: command-line front end for the modal RKDG acoustics solver.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rkdg/export.hpp"
#include "rkdg/simulation.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kBlowUp = 3, kIoError = 4 };

rkdg::SimConfig load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
  auto config = rkdg::load_config(path);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw rkdg::ConfigError("--set expects key=value, got '" + item + "'");
    rkdg::set_config_value(config, item.substr(0, eq), item.substr(eq + 1));
  }
  return config;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides, bool quiet) {
  const auto config = load_with_overrides(path, overrides);
  auto problem = rkdg::build_problem(config);
  std::ostream* log = quiet ? nullptr : &std::cout;
  if (log) {
    *log << "mesh: " << problem.mesh.num_elements() << " elements, P = " << config.order << ", "
         << problem.op->state_size() << " dofs\n"
         << "lambda_max = " << problem.op->lambda_max() << " m/s, dt = " << problem.dt() << " s, " << problem.steps
         << " steps\n";
  }
  const auto result = rkdg::run_problem(problem, true, log);
  if (result.run.blowup) {
    std::cerr << "error: numerical blow-up at " << *result.run.blowup << "\n";
    return kBlowUp;
  }
  if (log && result.error) {
    *log << "error vs plane wave: L2 = " << result.error->l2 << ", H1 = " << result.error->h1 << " (excluded area "
         << result.error->excluded_area << ")\n";
  }
  if (log) *log << "outputs written to " << config.output.dir.string() << "\n";
  return kOk;
}

int cmd_sweep(const std::string& path, const std::vector<double>& hs, const std::vector<int>& orders,
              const std::string& table, const std::vector<std::string>& overrides, bool quiet) {
  const auto config = load_with_overrides(path, overrides);
  const auto sweep = rkdg::convergence_sweep(config, hs, orders, quiet ? nullptr : &std::cout);
  const std::filesystem::path out = table.empty() ? config.output.dir / "rates.csv" : std::filesystem::path(table);
  rkdg::write_rate_table(sweep, out);
  for (const auto& [order, slope] : sweep.slopes) std::cout << "P=" << order << " H1 slope " << slope << "\n";
  std::cout << "rate table written to " << out.string() << "\n";
  for (const auto& row : sweep.rows) {
    if (row.diverged) return kBlowUp;
  }
  return kOk;
}

int cmd_transit(const std::string& fwd, const std::string& bwd, bool quiet) {
  const auto forward = rkdg::load_config(fwd);
  const auto backward = rkdg::load_config(bwd);
  const auto r = rkdg::transit(forward, backward, true, quiet ? nullptr : &std::cout);
  std::cout << "delta_t = " << r.estimate.delta_t << " s (" << r.estimate.lag_samples << " steps)\n"
            << "v_hat = " << r.estimate.velocity << " m/s\n"
            << "path-averaged background velocity = " << r.path_average << " m/s\n"
            << "relative difference = " << 100.0 * r.relative_error << " %\n";
  return kOk;
}

int cmd_check_mesh(const std::string& path) {
  const auto mesh = rkdg::load_gmsh(path);
  const auto conn = rkdg::build_connectivity(mesh);
  std::cout << "vertices: " << mesh.num_vertices() << "\n"
            << "triangles: " << mesh.num_elements() << "\n"
            << "internal edges: " << conn.internal_edges.size() << "\n"
            << "boundary edges: " << conn.boundary_edges.size() << "\n"
            << "area: " << mesh.total_area() << "\n"
            << "max circumdiameter: " << mesh.max_circumdiameter() << "\n"
            << "min altitude: " << mesh.min_altitude() << "\n"
            << "boundary tags:";
  for (int tag : mesh.boundary_tags()) {
    std::cout << " " << tag;
    const auto it = mesh.physical_names.find(tag);
    if (it != mesh.physical_names.end()) std::cout << " (" << it->second << ")";
  }
  std::cout << "\n";
  return kOk;
}

int cmd_write_mesh(const std::string& path, const std::string& out, const std::vector<std::string>& overrides) {
  const auto config = load_with_overrides(path, overrides);
  rkdg::write_gmsh(rkdg::make_mesh(config), out);
  std::cout << "mesh written to " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modal RKDG solver for the linearized Euler equations"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  std::string config_path, second_path, table_path;
  std::vector<std::string> overrides;
  std::vector<double> hs;
  std::vector<int> orders;

  auto* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--set", overrides, "Override a config entry (key=value)");

  auto* sweep = app.add_subcommand("sweep", "Convergence study over mesh sizes and orders");
  sweep->set_help_flag("--help", "Print this help message and exit");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("--h", hs, "Mesh sizes")->required()->expected(1, -1);
  sweep->add_option("--p", orders, "Polynomial orders")->required()->expected(1, -1);
  sweep->add_option("--table", table_path, "Rate table path (default <output.dir>/rates.csv)");
  sweep->add_option("--set", overrides, "Override a config entry (key=value)");

  auto* tr = app.add_subcommand("transit", "Transit-time flow estimate from forward and backward runs");
  tr->add_option("forward", config_path, "Forward config")->required();
  tr->add_option("backward", second_path, "Backward config")->required();

  auto* check = app.add_subcommand("check-mesh", "Validate a mesh file and print statistics");
  check->add_option("mesh", config_path, "MSH 2.2 ASCII file")->required();

  auto* wm = app.add_subcommand("write-mesh", "Write the mesh of a config as MSH 2.2");
  wm->add_option("config", config_path, "Config file")->required();
  wm->add_option("output", second_path, "Output .msh path")->required();
  wm->add_option("--set", overrides, "Override a config entry (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, overrides, quiet);
    if (*sweep) return cmd_sweep(config_path, hs, orders, table_path, overrides, quiet);
    if (*tr) return cmd_transit(config_path, second_path, quiet);
    if (*check) return cmd_check_mesh(config_path);
    if (*wm) return cmd_write_mesh(config_path, second_path, overrides);
  } catch (const rkdg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const rkdg::BlowUpError& e) {
    std::cerr << "error: numerical blow-up: " << e.what() << "\n";
    return kBlowUp;
  } catch (const rkdg::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kIoError;
  } catch (const rkdg::BackgroundFormatError& e) {
    std::cerr << "background file error: " << e.what() << "\n";
    return kIoError;
  } catch (const rkdg::OutOfGridError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
