#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rkdg/analysis.hpp"
#include "rkdg/simulation.hpp"

using namespace rkdg;

namespace {

const PlaneWave kWave{};

Eigen::VectorXd burst(Eigen::Index len, Eigen::Index center) {
  Eigen::VectorXd s(len);
  for (Eigen::Index n = 0; n < len; ++n) {
    const double d = static_cast<double>(n - center);
    s(n) = std::exp(-d * d / 800.0) * std::sin(0.3 * d);
  }
  return s;
}

SimConfig small_plane_wave(int order, double h) {
  std::istringstream in(R"(version = 1
mesh.generator = rectangle
mesh.width = 0.01
mesh.height = 0.005
time.final = 4e-6
boundary.1.type = inlet
boundary.2.type = reflecting
boundary.3.type = reflecting
boundary.4.type = reflecting
analysis.exact = plane_wave
)");
  auto c = parse_config(in, "/tmp", "small.cfg");
  set_config_value(c, "space.order", std::to_string(order));
  set_config_value(c, "mesh.h", std::to_string(h));
  return c;
}

}  // namespace

TEST_CASE("plane wave support and values") {
  CHECK(plane_wave_exact(kWave, 0.005, 0.0, 0.005 / 1481.0 - 1e-9).u == 0.0);
  CHECK(plane_wave_exact(kWave, 0.005, 0.0, 0.005 / 1481.0 - 1e-9).rho == 0.0);
  CHECK(plane_wave_exact(kWave, 0.0, 0.3, 2.5e-7).u == doctest::Approx(-1e-3));
  CHECK(plane_wave_exact(kWave, 0.0, 0.0, 6e-6).u == 0.0);
  CHECK(plane_wave_exact(kWave, 0.001, 0.0, 2e-6).v == 0.0);
  const auto f = kWave.fronts(2e-6);
  CHECK(f[0] == doctest::Approx(2.962e-3));
  CHECK(f[1] == doctest::Approx(-4.443e-3));
}

TEST_CASE("plane wave density satisfies the linearized equations") {
  const double x = 0.0021, t = 3.1e-6, d = 1e-11, dx = 1e-8;
  const auto s = plane_wave_exact(kWave, x, 0.0, t);
  REQUIRE(s.u != 0.0);
  CHECK(s.rho / s.u == doctest::Approx(997.0 / 1481.0));
  // rho_t = -rho_bar u_x and u_t = -(c^2 / rho_bar) rho_x
  const double rho_t = (plane_wave_exact(kWave, x, 0, t + d).rho - plane_wave_exact(kWave, x, 0, t - d).rho) / (2 * d);
  const double u_t = (plane_wave_exact(kWave, x, 0, t + d).u - plane_wave_exact(kWave, x, 0, t - d).u) / (2 * d);
  const double u_x = (plane_wave_exact(kWave, x + dx, 0, t).u - plane_wave_exact(kWave, x - dx, 0, t).u) / (2 * dx);
  const double rho_x =
      (plane_wave_exact(kWave, x + dx, 0, t).rho - plane_wave_exact(kWave, x - dx, 0, t).rho) / (2 * dx);
  CHECK(rho_t == doctest::Approx(-997.0 * u_x).epsilon(1e-5));
  CHECK(u_t == doctest::Approx(-1481.0 * 1481.0 / 997.0 * rho_x).epsilon(1e-5));
  CHECK(s.grad_u.x() == doctest::Approx(u_x).epsilon(1e-5));
}

TEST_CASE("error norms of trivial states") {
  const Mesh mesh = rectangle_mesh({0.01, 0.005, 10, 5, {}, 0.0, 1});
  const ElementSpace space(2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3 * mesh.num_elements() * space.num_modes());
  const auto before = velocity_error_norms(mesh, space, zero, [](const Eigen::Vector2d& x) {
    return plane_wave_exact(kWave, x.x(), x.y(), 0.0);
  });
  CHECK(before.l2 == 0.0);
  CHECK(before.h1 == 0.0);
  CHECK(before.total_area == doctest::Approx(5e-5));

  // a linear field is reproduced exactly
  const auto linear = project(mesh, space, [](const Eigen::Vector2d& x) { return Eigen::Vector3d(0, 2 * x.x() - x.y(), 0); });
  const auto e = velocity_error_norms(mesh, space, linear, [](const Eigen::Vector2d& x) {
    ExactSample s;
    s.u = 2 * x.x() - x.y();
    s.grad_u = {2.0, -1.0};
    return s;
  });
  CHECK(e.h1 < 1e-12);

  const auto band = velocity_error_norms(mesh, space, zero, [](const Eigen::Vector2d&) { return ExactSample{}; },
                                         {0.005}, 1e-3);
  CHECK(band.excluded_area == doctest::Approx(2e-3 * 0.005).epsilon(0.1));
  CHECK(node_spacing(6e-4, 3) == doctest::Approx(2e-4));
}

TEST_CASE("projection of the exact solution beats the solve") {
  auto problem = build_problem(small_plane_wave(2, 1e-3));
  const auto result = run_problem(problem, false);
  REQUIRE(result.error.has_value());
  const double T = problem.config.final_time;
  const auto exact = [&](const Eigen::Vector2d& x) { return plane_wave_exact(kWave, x.x(), x.y(), T); };
  const auto projected = project(problem.mesh, *problem.space, [&](const Eigen::Vector2d& x) {
    const auto s = exact(x);
    return Eigen::Vector3d(s.rho, s.u, s.v);
  });
  const double band = node_spacing(1e-3, 2);
  const auto best = velocity_error_norms(problem.mesh, *problem.space, projected, exact, kWave.fronts(T), band);
  CHECK(best.l2 < result.error->l2);
  CHECK(result.error->h1 < 0.1);
}

TEST_CASE("log-log slope") {
  std::vector<double> x{1e-3, 5e-4, 2.5e-4, 1.25e-4}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("transit time from cross-correlation") {
  const double dt = 4e-5 / 3000, dx = 0.04;
  const auto forward = burst(3001, 1400);
  SUBCASE("identical series") {
    const auto est = transit_time_estimate(forward, forward, dt, dx, 1481.0);
    CHECK(est.delta_t == doctest::Approx(0.0).scale(1e-20));
    CHECK(est.velocity == doctest::Approx(0.0).scale(1e-12));
    CHECK_FALSE(est.ambiguous);
  }
  SUBCASE("shift of 18 samples") {
    const auto est = transit_time_estimate(forward, burst(3001, 1418), dt, dx, 1481.0);
    CHECK(est.lag_samples == doctest::Approx(18.0).epsilon(1e-9));
    CHECK(est.delta_t == doctest::Approx(2.4e-7).epsilon(1e-9));
    CHECK(est.velocity == doctest::Approx(1481.0 * 1481.0 * 2.4e-7 / 0.08).epsilon(1e-9));
    CHECK(est.velocity == doctest::Approx(6.58).epsilon(1e-3));
  }
  SUBCASE("sub-sample shift is interpolated") {
    Eigen::VectorXd a(3001), b(3001);
    for (Eigen::Index n = 0; n < a.size(); ++n) {
      const double d = n - 1400.0;
      a(n) = std::exp(-d * d / 2000.0);
      b(n) = std::exp(-(d - 7.4) * (d - 7.4) / 2000.0);
    }
    CHECK(transit_time_estimate(a, b, dt, dx, 1481.0).lag_samples == doctest::Approx(7.4).epsilon(0.01));
  }
  SUBCASE("periodic signal is flagged ambiguous") {
    Eigen::VectorXd s(3000);
    for (Eigen::Index n = 0; n < s.size(); ++n) s(n) = std::sin(2 * std::numbers::pi * n / 20.0);
    CHECK(transit_time_estimate(s, s, dt, dx, 1481.0).ambiguous);
  }
  CHECK_THROWS_AS(transit_time_estimate(forward, forward.head(10), dt, dx, 1481.0), std::invalid_argument);
}

TEST_CASE("path average of the Poiseuille profile") {
  const auto flow = BackgroundFlow::poiseuille(997.0, 1481.0, 20.0, 0.01, 1e-3);
  // along y = s 2R the profile is u_max (1 - (2s - 1)^2), mean 2/3 u_max
  CHECK(path_average_velocity(flow, {0.0, 0.0}, {0.04, 0.02}) == doctest::Approx(40.0 / 3.0).epsilon(1e-12));
  CHECK(path_average_velocity(flow, {0.0, 0.01}, {0.04, 0.01}) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(path_average_velocity(BackgroundFlow::rest(997, 1481), {0, 0}, {1, 1}) == 0.0);
}

TEST_CASE("mass inversion timing is positive") {
  const Eigen::VectorXd m = Eigen::VectorXd::Constant(1000, 2.0);
  CHECK(invert_mass(m).isApprox(Eigen::VectorXd::Constant(1000, 0.5)));
  const double t = time_mass_inversion(m, 3);
  CHECK(t > 0.0);
  CHECK(std::isfinite(t));
}
