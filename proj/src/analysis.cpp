#include "rkdg/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rkdg/dg_operator.hpp"
#include "rkdg/quadrature.hpp"

namespace rkdg {

std::vector<double> PlaneWave::fronts(double t) const {
  return {sound_speed * t, sound_speed * (t - cycles / frequency)};
}

ExactSample plane_wave_exact(const PlaneWave& w, double x, double, double t) {
  ExactSample s;
  const double lead = w.sound_speed * t;
  const double trail = w.sound_speed * (t - w.cycles / w.frequency);
  if (x < trail || x > lead) return s;
  const double omega = 2.0 * std::numbers::pi * w.frequency;
  const double phase = omega * (t - x / w.sound_speed);
  s.u = -w.amplitude * std::sin(phase);
  s.grad_u.x() = w.amplitude * std::cos(phase) * omega / w.sound_speed;
  s.rho = w.rho_bar * s.u / w.sound_speed;
  return s;
}

ErrorNorms velocity_error_norms(const Mesh& mesh, const ElementSpace& space, const Eigen::VectorXd& state,
                                const std::function<ExactSample(const Eigen::Vector2d&)>& exact,
                                const std::vector<double>& fronts, double band) {
  const int ne = mesh.num_elements();
  const int n = space.num_modes();
  const auto rule = triangle_rule(std::min(2 * space.order() + 2, kMaxTriangleOrder));
  const Eigen::MatrixXd phi = tabulate_values(space.order(), rule.nodes);
  const auto [gxi, geta] = tabulate_gradients(space.order(), rule.nodes);
  const auto u_offset = static_cast<Eigen::Index>(ne) * n;

  double l2 = 0.0, grad = 0.0;
  ErrorNorms out;
  for (int e = 0; e < ne; ++e) {
    const auto map = affine_map(mesh, e);
    const auto coeffs = state.segment(u_offset + static_cast<Eigen::Index>(e) * n, n);
    const Eigen::VectorXd uh = phi * coeffs;
    const Eigen::VectorXd dxi = gxi * coeffs;
    const Eigen::VectorXd deta = geta * coeffs;
    const double det = std::abs(map.det);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x = map.to_physical(Eigen::Vector2d(rule.nodes.col(q)));
      const double w = rule.weights(q) * det;
      out.total_area += w;
      const bool skip = std::any_of(fronts.begin(), fronts.end(),
                                    [&](double f) { return std::abs(x.x() - f) < band; });
      if (skip) {
        out.excluded_area += w;
        continue;
      }
      const auto ex = exact(x);
      const Eigen::Vector2d g = map.inverse_transpose * Eigen::Vector2d(dxi(q), deta(q));
      l2 += w * (uh(q) - ex.u) * (uh(q) - ex.u);
      grad += w * (g - ex.grad_u).squaredNorm();
    }
  }
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(l2 + grad);
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired samples");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = std::log(x[i]);
    a(static_cast<Eigen::Index>(i), 1) = 1.0;
    b(static_cast<Eigen::Index>(i)) = std::log(y[i]);
  }
  return a.colPivHouseholderQr().solve(b)(0);
}

double path_average_velocity(const BackgroundFlow& flow, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             int points, int segments) {
  const auto rule = edge_rule(points);
  double sum = 0.0;
  for (int s = 0; s < segments; ++s) {
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const double t = (s + rule.nodes(0, q)) / segments;
      sum += rule.weights(q) / segments * flow.sample(a + t * (b - a)).velocity.x();
    }
  }
  return sum;
}

TransitEstimate transit_time_estimate(const Eigen::VectorXd& forward, const Eigen::VectorXd& backward, double dt,
                                      double dx, double c) {
  if (forward.size() != backward.size() || forward.size() < 3) {
    throw std::invalid_argument("transit_time_estimate: signals must have equal length >= 3");
  }
  if (!(dt > 0) || !(dx > 0)) throw std::invalid_argument("transit_time_estimate: dt and dx must be positive");
  const auto len = forward.size();
  // r(k) = sum_n forward(n) backward(n + k), k in (-len, len).
  Eigen::VectorXd r(2 * len - 1);
  for (Eigen::Index k = -(len - 1); k <= len - 1; ++k) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, -k);
    const Eigen::Index hi = std::min<Eigen::Index>(len, len - k);
    r(k + len - 1) = forward.segment(lo, hi - lo).dot(backward.segment(lo + k, hi - lo));
  }
  Eigen::Index best = 0;
  r.maxCoeff(&best);
  TransitEstimate est;
  est.peak = r(best);
  double offset = 0.0;
  if (best > 0 && best < r.size() - 1) {
    const double ym = r(best - 1), y0 = r(best), yp = r(best + 1);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) offset = 0.5 * (ym - yp) / denom;
  }
  for (Eigen::Index k = 1; k + 1 < r.size(); ++k) {
    if (k == best) continue;
    if (r(k) >= r(k - 1) && r(k) >= r(k + 1)) est.secondary_peak = std::max(est.secondary_peak, r(k));
  }
  est.ambiguous = est.peak > 0 && est.secondary_peak >= 0.95 * est.peak;
  est.lag_samples = static_cast<double>(best - (len - 1)) + offset;
  est.delta_t = est.lag_samples * dt;
  est.velocity = c * c * est.delta_t / (2.0 * dx);
  return est;
}

double time_mass_inversion(const Eigen::VectorXd& mass_diag, int repeats) {
  using Clock = std::chrono::steady_clock;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(mass_diag.size());
  // Batch size chosen so one batch touches at least ~4M entries.
  const int batch = static_cast<int>(std::max<Eigen::Index>(1, 4'000'000 / std::max<Eigen::Index>(1, mass_diag.size())));
  double best = std::numeric_limits<double>::infinity();
  volatile double sink = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    for (int b = 0; b < batch; ++b) {
      invert_mass(mass_diag, inv);
      sink = sink + inv(b % inv.size());
    }
    best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count() / batch);
  }
  return best;
}

}  // namespace rkdg
