#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rkdg {

/// Background velocity, its gradient G(i, j) = d u_i / d x_j, and the
/// background pressure gradient at one point.
struct BackgroundSample {
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  Eigen::Matrix2d velocity_gradient = Eigen::Matrix2d::Zero();
  Eigen::Vector2d pressure_gradient = Eigen::Vector2d::Zero();

  double divergence() const { return velocity_gradient.trace(); }
};

struct RestFlow {};

/// Pipe flow u(y) = G/(4 mu) (R^2 - (y - R)^2), v = 0, p = -G x, with the
/// pipe wall at y = 0 and the centerline at y = R.
struct PoiseuilleFlow {
  double u_max = 0.0;
  double radius = 0.0;
  double viscosity = 0.0;

  double pressure_drop() const { return 4.0 * viscosity * u_max / (radius * radius); }
};

struct AnalyticFlow {
  std::function<BackgroundSample(const Eigen::Vector2d&)> sample;
};

/// Rectilinear samples of (u, v, p) with bilinear interpolation.
struct GriddedFlow {
  Eigen::VectorXd x;  // ascending
  Eigen::VectorXd y;  // ascending
  Eigen::MatrixXd u;  // u(i, j) at (x_i, y_j)
  Eigen::MatrixXd v;
  Eigen::MatrixXd p;
};

/// Malformed background CSV.
class BackgroundFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfGridError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Stationary background state (rho_bar, c, u_bar, grad p_bar).
class BackgroundFlow {
 public:
  using Field = std::variant<RestFlow, PoiseuilleFlow, AnalyticFlow, GriddedFlow>;

  BackgroundFlow(double rho_bar, double sound_speed, Field field = RestFlow{});

  static BackgroundFlow rest(double rho_bar, double sound_speed);
  static BackgroundFlow poiseuille(double rho_bar, double sound_speed, double u_max, double radius,
                                   double viscosity);

  double rho_bar() const { return rho_bar_; }
  double sound_speed() const { return sound_speed_; }
  const Field& field() const { return field_; }
  bool is_rest() const { return std::holds_alternative<RestFlow>(field_); }

  BackgroundSample sample(const Eigen::Vector2d& x) const;

 private:
  double rho_bar_;
  double sound_speed_;
  Field field_;
};

inline BackgroundSample sample_background(const BackgroundFlow& flow, const Eigen::Vector2d& x) {
  return flow.sample(x);
}

/// Samples an arbitrary flow on an (nx x ny) grid covering the box.
GriddedFlow grid_from(const BackgroundFlow& flow, double x0, double x1, int nx, double y0, double y1,
                      int ny);

/// Reads a CSV with header `x,y,u,v,p` on a rectilinear grid, rows ordered
/// with x varying fastest.
GriddedFlow read_background_csv(const std::filesystem::path& path);
void write_background_csv(const GriddedFlow& grid, const std::filesystem::path& path);

}  // namespace rkdg
