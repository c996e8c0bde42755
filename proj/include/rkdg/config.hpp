#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkdg/boundary.hpp"
#include "rkdg/mesh.hpp"
#include "rkdg/time_integrator.hpp"

namespace rkdg {

inline constexpr int kConfigVersion = 1;

enum class BackgroundKind { Rest, Poiseuille, Gridded };
enum class InitialKind { Zero, Gaussian };
/// Length used in the CFL bound.
enum class CflLength { Inradius, Nominal, MinAltitude, Circumdiameter };

struct BackgroundSpec {
  BackgroundKind kind = BackgroundKind::Rest;
  double u_max = 0.0;
  double radius = 0.0;
  double viscosity = 1.0016e-3;
  std::filesystem::path file;
};

/// Gaussian density pulse rho = amplitude exp(-|x - center|^2 / width^2),
/// velocity zero.
struct InitialSpec {
  InitialKind kind = InitialKind::Zero;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 1.0;
  double amplitude = 1e-3;
};

struct OutputSpec {
  std::filesystem::path dir = "output";
  int vtk_every = 0;
  bool final_vtk = true;
  int subdivision = 0;  // 0: polynomial order
  int progress_every = 0;
  int norm_every = 1;
  bool dump_operator = false;
};

struct TransitSpec {
  std::string receiver;
  Eigen::Vector2d path_start = Eigen::Vector2d::Zero();
  Eigen::Vector2d path_end = Eigen::Vector2d::Zero();
  std::optional<double> dx;
  double window_start = 0.0;
  double window_end = std::numeric_limits<double>::infinity();
  bool has_path = false;
};

struct SimConfig {
  std::filesystem::path source;
  std::filesystem::path mesh_path;
  std::optional<RectangleMeshSpec> rectangle;
  /// Target cell size for the rectangle generator; overrides nx, ny.
  std::optional<double> mesh_h;

  int order = 1;
  int edge_points = 0;
  int volume_order = 0;

  double final_time = 0.0;
  int steps = 0;
  std::optional<double> k_cfl;
  double safety = 0.9;
  CflLength cfl_length = CflLength::Inradius;

  double sound_speed = 1481.0;
  double rho_bar = 997.0;
  BackgroundSpec background;
  bool local_lambda = false;
  std::optional<double> lambda_override;

  std::map<int, BoundaryCondition> boundaries;
  std::vector<Probe> probes;
  InitialSpec initial;
  OutputSpec output;
  bool exact_error = false;
  TransitSpec transit;

  /// Normalized key = value lines, sorted; input to the hash.
  std::map<std::string, std::string> entries;

  std::uint64_t hash() const;
  std::string hash_hex() const;
};

/// Parses the flat `key = value` format; `#` starts a comment. Relative
/// paths resolve against `base_dir`. Unknown keys and malformed values
/// raise ConfigError naming the line.
SimConfig parse_config(std::istream& in, const std::filesystem::path& base_dir,
                       const std::string& source_name = "<config>");
SimConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` entry on top of an existing config.
void set_config_value(SimConfig& config, const std::string& key, const std::string& value);

/// Checks cross-field consistency (required keys, ranges).
void validate_config(const SimConfig& config);

std::string to_string(CflLength length);

/// Rectangle generator parameters with `mesh_h` resolved into nx, ny.
RectangleMeshSpec resolved_rectangle(const SimConfig& config);

}  // namespace rkdg
