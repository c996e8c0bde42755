#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkdg/basis.hpp"
#include "rkdg/mesh.hpp"

namespace rkdg {

/// VTK legacy ASCII unstructured grid. Every element is split into
/// subdivision^2 sub-triangles with its own (discontinuous) vertices; point
/// data are rho, p = c^2 rho and the velocity vector.
void export_fields(const Eigen::VectorXd& state, const Mesh& mesh, const ElementSpace& space, double sound_speed,
                   const std::filesystem::path& path, int subdivision = 1);

struct ProbeTable {
  std::vector<std::string> names;
  std::vector<double> times;
  Eigen::MatrixXd values;  // rows = times, cols = probes
};

/// CSV with header `t,<name>...`, 17 significant digits.
void export_probes(const ProbeTable& table, const std::filesystem::path& path);
ProbeTable read_probes(const std::filesystem::path& path);

/// CSV with the given header and rows.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Text record of `key = value` lines in the given order.
void write_metadata(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace rkdg
