#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rkdg {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh file; carries the 1-based line number.
class ParseError : public MeshError {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : MeshError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct TaggedEdge {
  std::array<int, 2> vertices;
  int tag = 0;
};

/// Conforming triangulation with counterclockwise triangles and physically
/// tagged boundary edges.
struct Mesh {
  Eigen::Matrix2Xd vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<TaggedEdge> boundary_edges;
  std::map<int, std::string> physical_names;
  /// Boundary refinement parameter the mesh was generated with, if known.
  double nominal_h = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.cols()); }
  int num_elements() const { return static_cast<int>(triangles.size()); }

  double signed_area(int element) const;
  double total_area() const;
  /// Largest element circumdiameter.
  double max_circumdiameter() const;
  /// Smallest element altitude.
  double min_altitude() const;
  /// Smallest inscribed-circle radius.
  double min_inradius() const;
  std::vector<int> boundary_tags() const;
};

/// Reads the MSH 2.2 ASCII subset (line and triangle elements; physical tag
/// taken from the first tag entry). Clockwise triangles are reordered.
Mesh load_gmsh(const std::filesystem::path& path);
Mesh parse_gmsh(std::istream& in, const std::string& source_name = "<stream>");
void write_gmsh(const Mesh& mesh, const std::filesystem::path& path);

struct InternalEdge {
  int plus = -1;   // element the normal points into
  int minus = -1;  // element the normal points out of
  int local_plus = -1;
  int local_minus = -1;
  std::array<int, 2> vertices{};  // ascending vertex indices
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  double length = 0.0;
};

struct BoundaryEdge {
  int element = -1;
  int local = -1;
  std::array<int, 2> vertices{};  // counterclockwise order of the owner
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();  // outward
  double length = 0.0;
  int tag = 0;
};

/// Oriented edge topology. Local edge k of a triangle joins its stored
/// vertices k and k+1 (mod 3).
struct EdgeConnectivity {
  std::vector<InternalEdge> internal_edges;
  std::vector<BoundaryEdge> boundary_edges;
  /// Internal edges touching each element (up to three).
  std::vector<std::vector<int>> element_internal_edges;
};

EdgeConnectivity build_connectivity(const Mesh& mesh);

/// x = origin + J * (xi, eta), mapping the reference triangle
/// (0,0), (1,0), (0,1) onto the element vertices in stored order.
struct AffineMap {
  Eigen::Matrix2d jacobian;
  Eigen::Vector2d origin;
  double det = 0.0;
  Eigen::Matrix2d inverse_transpose;

  Eigen::Vector2d to_physical(const Eigen::Vector2d& ref) const { return origin + jacobian * ref; }
  Eigen::Vector2d to_reference(const Eigen::Vector2d& x) const {
    return inverse_transpose.transpose() * (x - origin);
  }
  template <typename Derived>
  Eigen::Matrix2Xd to_physical(const Eigen::MatrixBase<Derived>& refs) const {
    return (jacobian * refs).colwise() + origin;
  }
};

AffineMap affine_map(const Mesh& mesh, int element);

/// Locates the lowest-index element containing `x` (barycentric tolerance
/// 1e-12); returns -1 when outside.
int locate_element(const Mesh& mesh, const Eigen::Vector2d& x, double tol = 1e-12);

enum class Side { Left, Bottom, Right, Top };

/// Boundary segment [from, to] (coordinate along the side) that receives
/// its own physical tag.
struct BoundaryPatch {
  Side side = Side::Left;
  double from = 0.0;
  double to = 0.0;
  int tag = 0;
};

/// Rectangle [0, width] x [0, height] on an nx-by-ny grid, each cell split
/// along alternating diagonals. Sides are tagged left=1, bottom=2, right=3,
/// top=4 unless a patch claims the edge midpoint.
struct RectangleMeshSpec {
  double width = 1.0;
  double height = 1.0;
  int nx = 1;
  int ny = 1;
  std::vector<BoundaryPatch> patches;
  /// Random interior node displacement as a fraction of the cell size.
  double jitter = 0.0;
  unsigned seed = 1;
};

inline constexpr int kTagLeft = 1;
inline constexpr int kTagBottom = 2;
inline constexpr int kTagRight = 3;
inline constexpr int kTagTop = 4;

Mesh rectangle_mesh(const RectangleMeshSpec& spec);

}  // namespace rkdg
