#include "rkdg/background.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

namespace rkdg {

namespace {

struct Overloaded {
  const Eigen::Vector2d& x;

  BackgroundSample operator()(const RestFlow&) const { return {}; }

  BackgroundSample operator()(const PoiseuilleFlow& f) const {
    const double g = f.pressure_drop();
    const double dy = x.y() - f.radius;
    BackgroundSample s;
    s.velocity.x() = g / (4.0 * f.viscosity) * (f.radius * f.radius - dy * dy);
    s.velocity_gradient(0, 1) = -g / (2.0 * f.viscosity) * dy;
    s.pressure_gradient.x() = -g;
    return s;
  }

  BackgroundSample operator()(const AnalyticFlow& f) const { return f.sample(x); }

  BackgroundSample operator()(const GriddedFlow& g) const {
    const auto locate = [](const Eigen::VectorXd& axis, double value, const char* name) {
      const double tol = 1e-12 * std::max(1.0, std::abs(axis(axis.size() - 1) - axis(0)));
      if (value < axis(0) - tol || value > axis(axis.size() - 1) + tol) {
        throw OutOfGridError(std::string("background grid: ") + name + " = " + std::to_string(value) +
                             " outside the sampled range");
      }
      const auto* begin = axis.data();
      const auto* end = axis.data() + axis.size();
      auto it = std::upper_bound(begin, end, value);
      Eigen::Index i = std::clamp<Eigen::Index>(it - begin - 1, 0, axis.size() - 2);
      return i;
    };
    const Eigen::Index i = locate(g.x, x.x(), "x");
    const Eigen::Index j = locate(g.y, x.y(), "y");
    const double hx = g.x(i + 1) - g.x(i), hy = g.y(j + 1) - g.y(j);
    const double s = (x.x() - g.x(i)) / hx, t = (x.y() - g.y(j)) / hy;

    const auto bilinear = [&](const Eigen::MatrixXd& f, double& value, Eigen::Vector2d& grad) {
      const double f00 = f(i, j), f10 = f(i + 1, j), f01 = f(i, j + 1), f11 = f(i + 1, j + 1);
      value = (1 - s) * (1 - t) * f00 + s * (1 - t) * f10 + (1 - s) * t * f01 + s * t * f11;
      grad.x() = ((1 - t) * (f10 - f00) + t * (f11 - f01)) / hx;
      grad.y() = ((1 - s) * (f01 - f00) + s * (f11 - f10)) / hy;
    };
    BackgroundSample out;
    Eigen::Vector2d gu, gv, gp;
    double pv = 0;
    bilinear(g.u, out.velocity.x(), gu);
    bilinear(g.v, out.velocity.y(), gv);
    bilinear(g.p, pv, gp);
    out.velocity_gradient.row(0) = gu.transpose();
    out.velocity_gradient.row(1) = gv.transpose();
    out.pressure_gradient = gp;
    return out;
  }
};

}  // namespace

BackgroundFlow::BackgroundFlow(double rho_bar, double sound_speed, Field field)
    : rho_bar_(rho_bar), sound_speed_(sound_speed), field_(std::move(field)) {
  if (!(rho_bar > 0)) throw std::invalid_argument("BackgroundFlow: rho_bar must be positive");
  if (!(sound_speed > 0)) throw std::invalid_argument("BackgroundFlow: sound speed must be positive");
  if (const auto* g = std::get_if<GriddedFlow>(&field_)) {
    if (g->x.size() < 2 || g->y.size() < 2) throw std::invalid_argument("BackgroundFlow: grid needs 2x2 samples");
  }
}

BackgroundFlow BackgroundFlow::rest(double rho_bar, double sound_speed) {
  return BackgroundFlow(rho_bar, sound_speed, RestFlow{});
}

BackgroundFlow BackgroundFlow::poiseuille(double rho_bar, double sound_speed, double u_max, double radius,
                                          double viscosity) {
  if (!(u_max > 0) || !(radius > 0) || !(viscosity > 0)) {
    throw std::invalid_argument("poiseuille: u_max, radius and viscosity must be positive");
  }
  return BackgroundFlow(rho_bar, sound_speed, PoiseuilleFlow{u_max, radius, viscosity});
}

BackgroundSample BackgroundFlow::sample(const Eigen::Vector2d& x) const {
  return std::visit(Overloaded{x}, field_);
}

GriddedFlow grid_from(const BackgroundFlow& flow, double x0, double x1, int nx, double y0, double y1,
                      int ny) {
  GriddedFlow g;
  g.x = Eigen::VectorXd::LinSpaced(nx, x0, x1);
  g.y = Eigen::VectorXd::LinSpaced(ny, y0, y1);
  g.u.resize(nx, ny);
  g.v.resize(nx, ny);
  g.p.resize(nx, ny);
  // Pressure is reconstructed from its gradient along the grid lines.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto s = flow.sample({g.x(i), g.y(j)});
      g.u(i, j) = s.velocity.x();
      g.v(i, j) = s.velocity.y();
      if (i == 0 && j == 0) {
        g.p(i, j) = 0.0;
      } else if (i == 0) {
        const auto below = flow.sample({g.x(0), g.y(j - 1)});
        g.p(0, j) = g.p(0, j - 1) + 0.5 * (below.pressure_gradient.y() + s.pressure_gradient.y()) * (g.y(j) - g.y(j - 1));
      } else {
        const auto left = flow.sample({g.x(i - 1), g.y(j)});
        g.p(i, j) = g.p(i - 1, j) + 0.5 * (left.pressure_gradient.x() + s.pressure_gradient.x()) * (g.x(i) - g.x(i - 1));
      }
    }
  }
  return g;
}

GriddedFlow read_background_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open background file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw BackgroundFormatError(path.string() + ": empty background file");
  line.erase(std::remove_if(line.begin(), line.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }), line.end());
  if (line != "x,y,u,v,p") throw BackgroundFormatError(path.string() + ":1: expected header 'x,y,u,v,p'");

  std::vector<std::array<double, 5>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::array<double, 5> r{};
    if (!(ss >> r[0] >> r[1] >> r[2] >> r[3] >> r[4])) {
      throw BackgroundFormatError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    rows.push_back(r);
  }
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (ys.empty() || r[1] != ys.back()) {
      if (!ys.empty() && r[1] <= ys.back()) throw BackgroundFormatError(path.string() + ": y must be ascending");
      ys.push_back(r[1]);
    }
    if (ys.size() == 1) xs.push_back(r[0]);
  }
  const auto nx = static_cast<Eigen::Index>(xs.size()), ny = static_cast<Eigen::Index>(ys.size());
  if (nx < 2 || ny < 2 || static_cast<Eigen::Index>(rows.size()) != nx * ny) {
    throw BackgroundFormatError(path.string() + ": rows do not form a rectilinear grid");
  }
  GriddedFlow g;
  g.x = Eigen::Map<Eigen::VectorXd>(xs.data(), nx);
  g.y = Eigen::Map<Eigen::VectorXd>(ys.data(), ny);
  g.u.resize(nx, ny);
  g.v.resize(nx, ny);
  g.p.resize(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const auto& r = rows[static_cast<std::size_t>(j * nx + i)];
      if (r[0] != g.x(i)) throw BackgroundFormatError(path.string() + ": x coordinates differ between grid rows");
      g.u(i, j) = r[2];
      g.v(i, j) = r[3];
      g.p(i, j) = r[4];
    }
  }
  for (Eigen::Index i = 1; i < nx; ++i) {
    if (!(g.x(i) > g.x(i - 1))) throw BackgroundFormatError(path.string() + ": x must be ascending");
  }
  return g;
}

void write_background_csv(const GriddedFlow& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write background file " + path.string());
  out << "x,y,u,v,p\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < g.y.size(); ++j) {
    for (Eigen::Index i = 0; i < g.x.size(); ++i) {
      out << g.x(i) << "," << g.y(j) << "," << g.u(i, j) << "," << g.v(i, j) << "," << g.p(i, j) << "\n";
    }
  }
}

}  // namespace rkdg
