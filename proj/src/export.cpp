#include "rkdg/export.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rkdg/dg_operator.hpp"

namespace rkdg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::ios_base::failure("error writing " + path.string());
}

}  // namespace

void export_fields(const Eigen::VectorXd& state, const Mesh& mesh, const ElementSpace& space, double sound_speed,
                   const std::filesystem::path& path, int subdivision) {
  const int s = std::max(1, subdivision);
  const int ne = mesh.num_elements();
  const int n = space.num_modes();
  if (state.size() != static_cast<Eigen::Index>(kNumFields) * ne * n) {
    throw std::invalid_argument("export_fields: state size does not match mesh and space");
  }

  // Reference lattice (i, j), i + j <= s, and its sub-triangles.
  std::vector<Eigen::Vector2d> lattice;
  std::vector<std::vector<int>> id(static_cast<std::size_t>(s) + 1, std::vector<int>(static_cast<std::size_t>(s) + 1, -1));
  for (int j = 0; j <= s; ++j) {
    for (int i = 0; i + j <= s; ++i) {
      id[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<int>(lattice.size());
      lattice.emplace_back(static_cast<double>(i) / s, static_cast<double>(j) / s);
    }
  }
  std::vector<std::array<int, 3>> sub;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i + j < s; ++i) {
      const auto at = [&](int a, int b) { return id[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
      sub.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
      if (i + j + 1 < s) sub.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  Eigen::Matrix2Xd ref(2, static_cast<Eigen::Index>(lattice.size()));
  for (std::size_t k = 0; k < lattice.size(); ++k) ref.col(static_cast<Eigen::Index>(k)) = lattice[k];
  const Eigen::MatrixXd phi = tabulate_values(space.order(), ref);
  const auto npe = static_cast<Eigen::Index>(lattice.size());
  const Eigen::Index npts = npe * ne;

  Eigen::MatrixXd values(3, npts);
  Eigen::Matrix2Xd points(2, npts);
  for (int e = 0; e < ne; ++e) {
    const auto map = affine_map(mesh, e);
    points.middleCols(static_cast<Eigen::Index>(e) * npe, npe) = map.to_physical(ref);
    for (int f = 0; f < kNumFields; ++f) {
      values.row(f).segment(static_cast<Eigen::Index>(e) * npe, npe) =
          (phi * state.segment((static_cast<Eigen::Index>(f) * ne + e) * n, n)).transpose();
    }
  }

  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\nrkdg field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(12);
  out << "POINTS " << npts << " double\n";
  for (Eigen::Index k = 0; k < npts; ++k) out << points(0, k) << " " << points(1, k) << " 0\n";
  const std::size_t ncells = sub.size() * static_cast<std::size_t>(ne);
  out << "CELLS " << ncells << " " << 4 * ncells << "\n";
  for (int e = 0; e < ne; ++e) {
    const Eigen::Index base = static_cast<Eigen::Index>(e) * npe;
    for (const auto& t : sub) out << "3 " << base + t[0] << " " << base + t[1] << " " << base + t[2] << "\n";
  }
  out << "CELL_TYPES " << ncells << "\n";
  for (std::size_t k = 0; k < ncells; ++k) out << "5\n";
  out << "POINT_DATA " << npts << "\n";
  out << "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index k = 0; k < npts; ++k) out << values(0, k) << "\n";
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  const double c2 = sound_speed * sound_speed;
  for (Eigen::Index k = 0; k < npts; ++k) out << c2 * values(0, k) << "\n";
  out << "VECTORS velocity double\n";
  for (Eigen::Index k = 0; k < npts; ++k) out << values(1, k) << " " << values(2, k) << " 0\n";
  finish(out, path);
}

void export_probes(const ProbeTable& table, const std::filesystem::path& path) {
  if (table.values.rows() != static_cast<Eigen::Index>(table.times.size()) ||
      table.values.cols() != static_cast<Eigen::Index>(table.names.size())) {
    throw std::invalid_argument("export_probes: table dimensions disagree");
  }
  auto out = open_out(path);
  out << "t";
  for (const auto& name : table.names) out << "," << name;
  out << "\n" << std::setprecision(17);
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    out << table.times[i];
    for (Eigen::Index k = 0; k < table.values.cols(); ++k) out << "," << table.values(static_cast<Eigen::Index>(i), k);
    out << "\n";
  }
  finish(out, path);
}

ProbeTable read_probes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::string line;
  ProbeTable table;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty probe file");
  {
    std::istringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    if (field != "t") throw std::runtime_error(path.string() + ": header must start with 't'");
    while (std::getline(ss, field, ',')) table.names.push_back(field);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (row.size() != table.names.size() + 1) throw std::runtime_error(path.string() + ": ragged probe row");
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.times.push_back(rows[i][0]);
    for (std::size_t k = 0; k < table.names.size(); ++k) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k + 1];
    }
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("write_csv: header and column counts differ");
  auto out = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n" << std::setprecision(17);
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k].at(i);
    out << "\n";
  }
  finish(out, path);
}

void write_metadata(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_out(path);
  for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
  finish(out, path);
}

}  // namespace rkdg
