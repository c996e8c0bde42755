#include <random>

#include "rkdg/mesh.hpp"

namespace rkdg {

Mesh rectangle_mesh(const RectangleMeshSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1 || !(spec.width > 0) || !(spec.height > 0)) {
    throw MeshError("rectangle_mesh: need positive extents and at least one cell per direction");
  }
  const int nx = spec.nx, ny = spec.ny;
  const double dx = spec.width / nx, dy = spec.height / ny;
  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  Mesh mesh;
  mesh.nominal_h = std::max(dx, dy);
  mesh.vertices.resize(2, (nx + 1) * (ny + 1));
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      double x = i * dx, y = j * dy;
      if (spec.jitter > 0 && i > 0 && i < nx && j > 0 && j < ny) {
        x += spec.jitter * dx * jitter(rng);
        y += spec.jitter * dy * jitter(rng);
      }
      if (i == nx) x = spec.width;
      if (j == ny) y = spec.height;
      mesh.vertices.col(vid(i, j)) << x, y;
    }
  }

  mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }

  const auto tag_for = [&spec](Side side, double coord, int fallback) {
    for (const auto& p : spec.patches) {
      if (p.side == side && coord >= p.from && coord <= p.to) return p.tag;
    }
    return fallback;
  };
  for (int i = 0; i < nx; ++i) {
    const double xm = (i + 0.5) * dx;
    mesh.boundary_edges.push_back({{vid(i, 0), vid(i + 1, 0)}, tag_for(Side::Bottom, xm, kTagBottom)});
    mesh.boundary_edges.push_back({{vid(i + 1, ny), vid(i, ny)}, tag_for(Side::Top, xm, kTagTop)});
  }
  for (int j = 0; j < ny; ++j) {
    const double ym = (j + 0.5) * dy;
    mesh.boundary_edges.push_back({{vid(nx, j), vid(nx, j + 1)}, tag_for(Side::Right, ym, kTagRight)});
    mesh.boundary_edges.push_back({{vid(0, j + 1), vid(0, j)}, tag_for(Side::Left, ym, kTagLeft)});
  }

  mesh.physical_names = {{kTagLeft, "left"}, {kTagBottom, "bottom"}, {kTagRight, "right"}, {kTagTop, "top"}};
  for (const auto& p : spec.patches) mesh.physical_names.emplace(p.tag, "patch_" + std::to_string(p.tag));
  return mesh;
}

}  // namespace rkdg
