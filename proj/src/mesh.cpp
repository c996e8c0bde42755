#include "rkdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rkdg {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

Eigen::Vector2d right_normal(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  const Eigen::Vector2d d = to - from;
  return Eigen::Vector2d(d.y(), -d.x()).normalized();
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }
  int line() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  int line_no_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

long parse_count(LineReader& reader, const std::string& line) {
  std::istringstream ss(line);
  long n = -1;
  if (!(ss >> n) || n < 0) reader.fail("expected a non-negative count, got '" + line + "'");
  return n;
}

void validate_boundary(const Mesh& mesh, const std::string& source) {
  std::unordered_map<std::uint64_t, int> incidence;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) ++incidence[edge_key(t[k], t[(k + 1) % 3])];
  }
  std::unordered_map<std::uint64_t, int> tagged;
  for (const auto& e : mesh.boundary_edges) {
    const auto key = edge_key(e.vertices[0], e.vertices[1]);
    const auto it = incidence.find(key);
    if (it == incidence.end() || it->second != 1) {
      throw MeshError(source + ": tagged line element (" + std::to_string(e.vertices[0]) + ", " +
                      std::to_string(e.vertices[1]) + ") is not a boundary edge");
    }
    if (!tagged.emplace(key, e.tag).second) {
      throw MeshError(source + ": boundary edge tagged twice");
    }
  }
  for (const auto& [key, count] : incidence) {
    if (count > 2) throw MeshError(source + ": non-manifold edge shared by more than two triangles");
    if (count == 1 && !tagged.contains(key)) {
      throw MeshError(source + ": boundary edge (" + std::to_string(key & 0xffffffffu) + ", " +
                      std::to_string(key >> 32) + ") has no physical tag");
    }
  }
}

}  // namespace

double Mesh::signed_area(int element) const {
  const auto& t = triangles.at(static_cast<std::size_t>(element));
  const Eigen::Vector2d a = vertices.col(t[1]) - vertices.col(t[0]);
  const Eigen::Vector2d b = vertices.col(t[2]) - vertices.col(t[0]);
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e) sum += signed_area(e);
  return sum;
}

double Mesh::max_circumdiameter() const {
  double h = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const auto& t = triangles[static_cast<std::size_t>(e)];
    const double a = (vertices.col(t[1]) - vertices.col(t[0])).norm();
    const double b = (vertices.col(t[2]) - vertices.col(t[1])).norm();
    const double c = (vertices.col(t[0]) - vertices.col(t[2])).norm();
    h = std::max(h, a * b * c / (2.0 * signed_area(e)));
  }
  return h;
}

double Mesh::min_altitude() const {
  double h = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_elements(); ++e) {
    const auto& t = triangles[static_cast<std::size_t>(e)];
    const double area2 = 2.0 * signed_area(e);
    for (int k = 0; k < 3; ++k) {
      const double len = (vertices.col(t[(k + 1) % 3]) - vertices.col(t[k])).norm();
      h = std::min(h, area2 / len);
    }
  }
  return h;
}

double Mesh::min_inradius() const {
  double r = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_elements(); ++e) {
    const auto& t = triangles[static_cast<std::size_t>(e)];
    double perimeter = 0.0;
    for (int k = 0; k < 3; ++k) perimeter += (vertices.col(t[(k + 1) % 3]) - vertices.col(t[k])).norm();
    r = std::min(r, 2.0 * signed_area(e) / perimeter);
  }
  return r;
}

std::vector<int> Mesh::boundary_tags() const {
  std::set<int> tags;
  for (const auto& e : boundary_edges) tags.insert(e.tag);
  return {tags.begin(), tags.end()};
}

Mesh parse_gmsh(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);
  Mesh mesh;
  std::unordered_map<long, int> node_index;
  bool have_format = false, have_nodes = false, have_elements = false;

  std::string line;
  while (reader.next(line)) {
    const std::string section = trim(line);
    if (section == "$MeshFormat") {
      std::istringstream ss(reader.require("format line"));
      std::string version;
      int file_type = -1, data_size = 0;
      if (!(ss >> version >> file_type >> data_size)) reader.fail("malformed $MeshFormat line");
      if (version.rfind("2.2", 0) != 0) reader.fail("unsupported MSH version " + version + " (need 2.2)");
      if (file_type != 0) reader.fail("binary MSH files are not supported");
      if (trim(reader.require("$EndMeshFormat")) != "$EndMeshFormat") reader.fail("expected $EndMeshFormat");
      have_format = true;
    } else if (section == "$PhysicalNames") {
      const long n = parse_count(reader, reader.require("physical name count"));
      for (long k = 0; k < n; ++k) {
        std::istringstream ss(reader.require("physical name"));
        int dim = 0, tag = 0;
        std::string name;
        if (!(ss >> dim >> tag)) reader.fail("malformed physical name record");
        std::getline(ss, name);
        name = trim(name);
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
        mesh.physical_names[tag] = name;
      }
      if (trim(reader.require("$EndPhysicalNames")) != "$EndPhysicalNames") reader.fail("expected $EndPhysicalNames");
    } else if (section == "$Nodes") {
      if (!have_format) reader.fail("$Nodes before $MeshFormat");
      const long n = parse_count(reader, reader.require("node count"));
      mesh.vertices.resize(2, n);
      for (long k = 0; k < n; ++k) {
        std::istringstream ss(reader.require("node record"));
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z)) reader.fail("malformed node record");
        if (std::abs(z) > 1e-9) reader.fail("node " + std::to_string(id) + " has non-zero z coordinate");
        if (!node_index.emplace(id, static_cast<int>(k)).second) reader.fail("duplicate node id " + std::to_string(id));
        mesh.vertices.col(k) << x, y;
      }
      if (trim(reader.require("$EndNodes")) != "$EndNodes") reader.fail("expected $EndNodes");
      have_nodes = true;
    } else if (section == "$Elements") {
      if (!have_nodes) reader.fail("$Elements before $Nodes");
      const long n = parse_count(reader, reader.require("element count"));
      for (long k = 0; k < n; ++k) {
        std::istringstream ss(reader.require("element record"));
        long id = 0;
        int type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags) || ntags < 0) reader.fail("malformed element record");
        std::vector<int> tags(static_cast<std::size_t>(ntags));
        for (auto& t : tags) {
          if (!(ss >> t)) reader.fail("malformed element tags");
        }
        int nnodes = 0;
        switch (type) {
          case 1: nnodes = 2; break;
          case 2: nnodes = 3; break;
          case 15: nnodes = 1; break;
          default: reader.fail("unsupported element type " + std::to_string(type));
        }
        std::array<int, 3> v{};
        for (int j = 0; j < nnodes; ++j) {
          long node = 0;
          if (!(ss >> node)) reader.fail("missing element node");
          const auto it = node_index.find(node);
          if (it == node_index.end()) reader.fail("element references unknown node " + std::to_string(node));
          v[static_cast<std::size_t>(j)] = it->second;
        }
        if (type == 1) {
          if (tags.empty() || tags[0] == 0) {
            reader.fail("boundary line element " + std::to_string(id) + " lacks a physical tag");
          }
          mesh.boundary_edges.push_back({{v[0], v[1]}, tags[0]});
        } else if (type == 2) {
          mesh.triangles.push_back(v);
        }
      }
      if (trim(reader.require("$EndElements")) != "$EndElements") reader.fail("expected $EndElements");
      have_elements = true;
    } else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0) {
      // Unknown section: skip to its end marker.
      const std::string end = "$End" + section.substr(1);
      std::string skipped;
      do {
        skipped = reader.require(end.c_str());
      } while (trim(skipped) != end);
    } else {
      reader.fail("unexpected content '" + section + "'");
    }
  }
  if (!have_format || !have_nodes || !have_elements) {
    throw ParseError(source_name, reader.line(), "missing $MeshFormat, $Nodes or $Elements section");
  }
  if (mesh.triangles.empty()) throw MeshError(source_name + ": mesh has no triangles");

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.signed_area(e);
    if (area == 0.0) throw MeshError(source_name + ": degenerate triangle " + std::to_string(e));
    if (area < 0.0) std::swap(mesh.triangles[static_cast<std::size_t>(e)][1], mesh.triangles[static_cast<std::size_t>(e)][2]);
  }
  validate_boundary(mesh, source_name);
  return mesh;
}

Mesh load_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open mesh file " + path.string());
  return parse_gmsh(in, path.string());
}

void write_gmsh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write mesh file " + path.string());
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  if (!mesh.physical_names.empty()) {
    out << "$PhysicalNames\n" << mesh.physical_names.size() << "\n";
    for (const auto& [tag, name] : mesh.physical_names) out << "1 " << tag << " \"" << name << "\"\n";
    out << "$EndPhysicalNames\n";
  }
  out << std::setprecision(17);
  out << "$Nodes\n" << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << v + 1 << " " << mesh.vertices(0, v) << " " << mesh.vertices(1, v) << " 0\n";
  }
  out << "$EndNodes\n$Elements\n" << mesh.boundary_edges.size() + mesh.triangles.size() << "\n";
  long id = 1;
  for (const auto& e : mesh.boundary_edges) {
    out << id++ << " 1 2 " << e.tag << " " << e.tag << " " << e.vertices[0] + 1 << " " << e.vertices[1] + 1 << "\n";
  }
  for (const auto& t : mesh.triangles) {
    out << id++ << " 2 2 100 100 " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  }
  out << "$EndElements\n";
  if (!out) throw std::ios_base::failure("error writing mesh file " + path.string());
}

EdgeConnectivity build_connectivity(const Mesh& mesh) {
  struct Incidence {
    int element;
    int local;
    int from;  // start vertex in the element's counterclockwise order
  };
  std::unordered_map<std::uint64_t, std::vector<Incidence>> edges;
  std::vector<std::uint64_t> order;  // first-seen order, for a deterministic sweep
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    for (int k = 0; k < 3; ++k) {
      const auto key = edge_key(t[k], t[(k + 1) % 3]);
      auto& list = edges[key];
      if (list.empty()) order.push_back(key);
      list.push_back({e, k, t[k]});
    }
  }
  std::unordered_map<std::uint64_t, int> tags;
  for (const auto& b : mesh.boundary_edges) tags[edge_key(b.vertices[0], b.vertices[1])] = b.tag;

  EdgeConnectivity conn;
  conn.element_internal_edges.resize(static_cast<std::size_t>(mesh.num_elements()));
  for (const auto key : order) {
    const auto& list = edges[key];
    const int lo = static_cast<int>(key & 0xffffffffu);
    const int hi = static_cast<int>(key >> 32);
    if (list.size() > 2) throw MeshError("build_connectivity: non-manifold edge shared by more than two triangles");
    const Eigen::Vector2d a = mesh.vertices.col(lo), b = mesh.vertices.col(hi);
    if (list.size() == 2) {
      InternalEdge edge;
      edge.vertices = {lo, hi};
      edge.normal = right_normal(a, b);
      edge.length = (b - a).norm();
      // The element traversing lo -> hi counterclockwise has the right-hand
      // normal as its outward normal, so the normal leaves it.
      const Incidence& first = list[0].from == lo ? list[0] : list[1];
      const Incidence& second = list[0].from == lo ? list[1] : list[0];
      if (first.from != lo || second.from != hi) {
        throw MeshError("build_connectivity: inconsistent orientation across a shared edge");
      }
      edge.minus = first.element;
      edge.local_minus = first.local;
      edge.plus = second.element;
      edge.local_plus = second.local;
      const int index = static_cast<int>(conn.internal_edges.size());
      conn.element_internal_edges[static_cast<std::size_t>(edge.minus)].push_back(index);
      conn.element_internal_edges[static_cast<std::size_t>(edge.plus)].push_back(index);
      conn.internal_edges.push_back(edge);
    } else {
      const auto& inc = list[0];
      const auto& t = mesh.triangles[static_cast<std::size_t>(inc.element)];
      BoundaryEdge edge;
      edge.element = inc.element;
      edge.local = inc.local;
      edge.vertices = {t[inc.local], t[(inc.local + 1) % 3]};
      const Eigen::Vector2d p = mesh.vertices.col(edge.vertices[0]), q = mesh.vertices.col(edge.vertices[1]);
      edge.normal = right_normal(p, q);
      edge.length = (q - p).norm();
      const auto it = tags.find(key);
      if (it == tags.end()) throw MeshError("build_connectivity: untagged boundary edge");
      edge.tag = it->second;
      conn.boundary_edges.push_back(edge);
    }
  }
  return conn;
}

AffineMap affine_map(const Mesh& mesh, int element) {
  const auto& t = mesh.triangles.at(static_cast<std::size_t>(element));
  AffineMap map;
  map.origin = mesh.vertices.col(t[0]);
  map.jacobian.col(0) = mesh.vertices.col(t[1]) - map.origin;
  map.jacobian.col(1) = mesh.vertices.col(t[2]) - map.origin;
  map.det = map.jacobian.determinant();
  map.inverse_transpose = map.jacobian.inverse().transpose();
  return map;
}

int locate_element(const Mesh& mesh, const Eigen::Vector2d& x, double tol) {
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Eigen::Vector2d ref = affine_map(mesh, e).to_reference(x);
    if (ref.x() >= -tol && ref.y() >= -tol && ref.x() + ref.y() <= 1.0 + tol) return e;
  }
  return -1;
}

}  // namespace rkdg
