#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "rkdg_test_cli";

const char* kBase = R"(version = 1
mesh.generator = rectangle
mesh.width = 0.004
mesh.height = 0.002
mesh.h = 5e-4
space.order = 1
time.final = 1e-6
boundary.1.type = inlet
boundary.2.type = absorbing
boundary.3.type = reflecting
boundary.4.type = reflecting
probe.mid = 0.002 0.001
output.dir = out
)";

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  const auto path = kDir / name;
  std::ofstream(path) << text;
  return path;
}

int dgsim(const std::string& args) {
  const std::string cmd = std::string("\"") + DGSIM_PATH + "\" -q " + args + " > \"" + (kDir / "log.txt").string() +
                          "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("exit code 0 and outputs of a run") {
  const auto cfg = write_file("ok.cfg", kBase);
  fs::remove_all(kDir / "out");
  CHECK(dgsim("run \"" + cfg.string() + "\"") == 0);
  CHECK(fs::exists(kDir / "out" / "probes.csv"));
  CHECK(fs::exists(kDir / "out" / "metadata.txt"));
  CHECK(fs::exists(kDir / "out" / "field_final.vtk"));
}

TEST_CASE("exit code 2 on configuration errors") {
  CHECK(dgsim("run \"" + write_file("typo.cfg", std::string(kBase) + "space.oder = 2\n").string() + "\"") == 2);
  CHECK(dgsim("run \"" + write_file("probe.cfg", std::string(kBase) + "probe.far = 1 1\n").string() + "\"") == 2);
  CHECK(dgsim("run \"" + write_file("ok.cfg", kBase).string() + "\" --set space.order=0") == 2);
  CHECK(dgsim("frobnicate") == 2);
}

TEST_CASE("exit code 3 on numerical blow-up") {
  const auto cfg = write_file("blow.cfg", std::string(kBase) + "time.final = 2e-4\ntime.steps = 40\n");
  CHECK(dgsim("run \"" + cfg.string() + "\"") == 3);
  // partial probe record is still flushed
  CHECK(fs::exists(kDir / "out" / "probes.csv"));
}

TEST_CASE("exit code 4 on I/O errors") {
  CHECK(dgsim("run \"" + (kDir / "missing.cfg").string() + "\"") == 4);
  CHECK(dgsim("check-mesh \"" + (kDir / "missing.msh").string() + "\"") == 4);
  CHECK(dgsim("check-mesh \"" + write_file("bad.msh", "$MeshFormat\n9.9 0 8\n$EndMeshFormat\n").string() + "\"") == 4);
  const auto nomesh = write_file("nomesh.cfg", "version = 1\nmesh.path = nowhere.msh\ntime.final = 1e-6\n");
  CHECK(dgsim("run \"" + nomesh.string() + "\"") == 4);
}

TEST_CASE("check-mesh on the two-triangle fixture") {
  CHECK(dgsim("check-mesh \"" RKDG_SOURCE_DIR "/tests/data/two_triangles.msh\"") == 0);
  std::ifstream in(kDir / "log.txt");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("triangles: 2") != std::string::npos);
  CHECK(text.find("internal edges: 1") != std::string::npos);
  CHECK(text.find("1 (inlet)") != std::string::npos);
}
