#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "rkdg/mesh.hpp"

using namespace rkdg;

namespace {

const std::filesystem::path kData = std::filesystem::path(RKDG_SOURCE_DIR) / "tests" / "data";

Mesh parse(const std::string& text) {
  std::istringstream in(text);
  return parse_gmsh(in, "inline.msh");
}

const char* kHeader = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

}  // namespace

TEST_CASE("two-triangle fixture") {
  const auto mesh = load_gmsh(kData / "two_triangles.msh");
  CHECK(mesh.num_vertices() == 4);
  CHECK(mesh.num_elements() == 2);
  CHECK(mesh.boundary_edges.size() == 4);
  CHECK(mesh.physical_names.at(1) == "inlet");
  CHECK(mesh.boundary_tags() == std::vector<int>{1, 2});
  CHECK(mesh.total_area() == doctest::Approx(1.0));
  // the second triangle is stored clockwise in the file
  CHECK(mesh.signed_area(0) == doctest::Approx(0.5));
  CHECK(mesh.signed_area(1) == doctest::Approx(0.5));
  CHECK(mesh.min_altitude() == doctest::Approx(std::sqrt(0.5)));
  CHECK(mesh.min_inradius() == doctest::Approx(1.0 / (2.0 + std::sqrt(2.0))));
  CHECK(mesh.max_circumdiameter() == doctest::Approx(std::sqrt(2.0)));

  const auto conn = build_connectivity(mesh);
  REQUIRE(conn.internal_edges.size() == 1);
  REQUIRE(conn.boundary_edges.size() == 4);
  const auto& e = conn.internal_edges[0];
  CHECK(e.vertices == std::array<int, 2>{0, 2});
  CHECK(e.length == doctest::Approx(std::sqrt(2.0)));
  // the normal points from minus into plus
  const auto centroid = [&](int k) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(k)];
    return Eigen::Vector2d((mesh.vertices.col(t[0]) + mesh.vertices.col(t[1]) + mesh.vertices.col(t[2])) / 3.0);
  };
  CHECK(e.normal.dot(centroid(e.plus) - centroid(e.minus)) > 0.0);
  CHECK(e.normal.norm() == doctest::Approx(1.0));
}

TEST_CASE("boundary normals point outward") {
  const auto mesh = rectangle_mesh({2.0, 1.0, 4, 3, {}, 0.0, 1});
  const auto conn = build_connectivity(mesh);
  for (const auto& b : conn.boundary_edges) {
    const Eigen::Vector2d mid = 0.5 * (mesh.vertices.col(b.vertices[0]) + mesh.vertices.col(b.vertices[1]));
    const Eigen::Vector2d probe = mid + 1e-6 * b.normal;
    CHECK(locate_element(mesh, probe) == -1);
  }
}

TEST_CASE("rectangle generator edge counts") {
  SUBCASE("N = 2") {
    const auto mesh = rectangle_mesh({1.0, 1.0, 2, 2, {}, 0.0, 1});
    const auto conn = build_connectivity(mesh);
    CHECK(mesh.num_elements() == 8);
    CHECK(conn.internal_edges.size() == 8);
    CHECK(conn.boundary_edges.size() == 8);
  }
  SUBCASE("N = 4") {
    const auto mesh = rectangle_mesh({1.0, 1.0, 4, 4, {}, 0.0, 1});
    const auto conn = build_connectivity(mesh);
    CHECK(mesh.num_elements() == 32);
    CHECK(conn.internal_edges.size() == 40);
    CHECK(conn.boundary_edges.size() == 16);
  }
}

TEST_CASE("Euler relation holds on generated meshes") {
  for (double jitter : {0.0, 0.2}) {
    const auto mesh = rectangle_mesh({0.03, 0.02, 7, 5, {}, jitter, 3});
    const auto conn = build_connectivity(mesh);
    const auto edges = static_cast<long>(conn.internal_edges.size() + conn.boundary_edges.size());
    CHECK(mesh.num_vertices() - edges + mesh.num_elements() == 1);
    CHECK(mesh.total_area() == doctest::Approx(0.03 * 0.02));
    for (int e = 0; e < mesh.num_elements(); ++e) CHECK(mesh.signed_area(e) > 0.0);
  }
}

TEST_CASE("side tags and patches") {
  RectangleMeshSpec spec{4.0, 2.0, 4, 4, {{Side::Left, 0.5, 1.5, 7}}, 0.0, 1};
  const auto mesh = rectangle_mesh(spec);
  std::map<int, double> length;
  for (const auto& e : mesh.boundary_edges) {
    length[e.tag] += (mesh.vertices.col(e.vertices[0]) - mesh.vertices.col(e.vertices[1])).norm();
  }
  CHECK(length[kTagLeft] == doctest::Approx(1.0));
  CHECK(length[7] == doctest::Approx(1.0));
  CHECK(length[kTagBottom] == doctest::Approx(4.0));
  CHECK(length[kTagRight] == doctest::Approx(2.0));
  CHECK(length[kTagTop] == doctest::Approx(4.0));
}

TEST_CASE("affine map round trip") {
  const auto mesh = load_gmsh(kData / "two_triangles.msh");
  for (int e = 0; e < 2; ++e) {
    const auto map = affine_map(mesh, e);
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    CHECK((map.to_physical(Eigen::Vector2d(0, 0)) - mesh.vertices.col(t[0])).norm() < 1e-15);
    CHECK((map.to_physical(Eigen::Vector2d(1, 0)) - mesh.vertices.col(t[1])).norm() < 1e-15);
    CHECK((map.to_physical(Eigen::Vector2d(0, 1)) - mesh.vertices.col(t[2])).norm() < 1e-15);
    const Eigen::Vector2d x(0.4, 0.45);
    CHECK((map.to_physical(map.to_reference(x)) - x).norm() < 1e-14);
    CHECK(map.det == doctest::Approx(2.0 * mesh.signed_area(e)));
  }
}

TEST_CASE("point location picks the lowest index on shared edges") {
  const auto mesh = load_gmsh(kData / "two_triangles.msh");
  CHECK(locate_element(mesh, Eigen::Vector2d(0.5, 0.5)) == 0);
  CHECK(locate_element(mesh, Eigen::Vector2d(0.8, 0.1)) == 0);
  CHECK(locate_element(mesh, Eigen::Vector2d(0.1, 0.8)) == 1);
  CHECK(locate_element(mesh, Eigen::Vector2d(1.5, 0.5)) == -1);
}

TEST_CASE("MSH write and reload") {
  const auto mesh = rectangle_mesh({1.0, 2.0, 3, 4, {}, 0.1, 5});
  const auto path = std::filesystem::temp_directory_path() / "rkdg_test_mesh.msh";
  write_gmsh(mesh, path);
  const auto back = load_gmsh(path);
  CHECK(back.num_elements() == mesh.num_elements());
  CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.boundary_edges.size() == mesh.boundary_edges.size());
  std::filesystem::remove(path);
}

TEST_CASE("malformed MSH input") {
  SUBCASE("wrong version") {
    CHECK_THROWS_AS(parse("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n"), ParseError);
  }
  SUBCASE("nonzero z reports the line") {
    try {
      parse(std::string(kHeader) + "$Nodes\n1\n1 0 0 0.5\n$EndNodes\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 6);
    }
  }
  SUBCASE("unknown node") {
    CHECK_THROWS_AS(parse(std::string(kHeader) +
                          "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n$Elements\n1\n1 2 2 0 1 1 2 9\n$EndElements\n"),
                    ParseError);
  }
  SUBCASE("untagged boundary") {
    CHECK_THROWS_AS(parse(std::string(kHeader) +
                          "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n$Elements\n2\n1 1 2 1 1 1 2\n"
                          "2 2 2 0 1 1 2 3\n$EndElements\n"),
                    MeshError);
  }
  SUBCASE("degenerate triangle") {
    CHECK_THROWS_AS(parse(std::string(kHeader) +
                          "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 2 0 0\n$EndNodes\n$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n"),
                    MeshError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_gmsh(kData / "absent.msh"), std::ios_base::failure); }
}
