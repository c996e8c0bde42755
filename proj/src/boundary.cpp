#include "rkdg/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "rkdg/dg_operator.hpp"

namespace rkdg {

BoundaryCondition BoundaryCondition::make_inlet(const InletSpec& spec) {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Inlet;
  bc.inlet = spec;
  return bc;
}

BoundaryCondition BoundaryCondition::make_absorbing(const AbsorbingSpec& spec) {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Absorbing;
  bc.absorbing = spec;
  return bc;
}

BoundaryCondition BoundaryCondition::make_resistive(const ResistiveSpec& spec) {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Resistive;
  bc.resistive = spec;
  return bc;
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Inlet: return "inlet";
    case BoundaryKind::Reflecting: return "reflecting";
    case BoundaryKind::Absorbing: return "absorbing";
    case BoundaryKind::Resistive: return "resistive";
  }
  return "unknown";
}

double inlet_profile(const InletSpec& spec, double x, double y, double t) {
  if (t < 0.0 || t > spec.cycles / spec.frequency) return 0.0;
  if (spec.support_axis >= 0) {
    const double coord = spec.support_axis == 0 ? x : y;
    if (coord < spec.support_min || coord > spec.support_max) return 0.0;
  }
  return spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency * t);
}

double resistive_flux(double rho, double theta, double rho_w, double c_w, double c) {
  const double ct = std::cos(theta);
  const double arg = std::max(c * c - c_w * c_w + c_w * c_w * ct * ct, 0.0);
  return std::sqrt(arg) * rho * c / (rho_w * c_w);
}

double absorbing_flux(double rho, double eta, double c, double rho_bar) { return eta * rho * c / rho_bar; }

double critical_angle(double c, double c_w) {
  if (c_w <= c) return std::numbers::pi / 2;
  return std::asin(c / c_w);
}

FilterState filter_init(const Eigen::Vector2d& outward_normal, double magnitude) {
  return {-magnitude * outward_normal, 1.0};
}

void filter_update(FilterState& state, const Eigen::Vector2d& u_trace, const Eigen::Vector2d& n, double alpha) {
  const double sgn = u_trace.dot(n) >= 0.0 ? 1.0 : -1.0;
  state.u_hat = (1.0 - alpha) * state.u_hat + alpha * sgn * u_trace;
  const double norm = state.u_hat.norm();
  if (norm == 0.0) return;
  state.eta = std::clamp(std::abs(state.u_hat.dot(n)) / norm, 0.0, 1.0);
}

BoundaryModel::BoundaryModel(std::map<int, BoundaryCondition> conditions, const BoundaryQuadrature& quadrature,
                             double rho_bar, double c)
    : conditions_(std::move(conditions)), quadrature_(&quadrature), rho_bar_(rho_bar), c_(c) {
  std::set<int> present;
  for (const auto& edge : quadrature.edges) present.insert(edge.tag);
  for (int tag : present) {
    if (!conditions_.count(tag)) {
      throw ConfigError("boundary tag " + std::to_string(tag) + " has no boundary condition");
    }
  }
  for (const auto& [tag, bc] : conditions_) {
    if (!present.count(tag)) {
      throw ConfigError("boundary condition given for tag " + std::to_string(tag) + ", which is not on the mesh boundary");
    }
    const std::string where = "boundary tag " + std::to_string(tag) + ": ";
    switch (bc.kind) {
      case BoundaryKind::Absorbing:
        if (!(bc.absorbing.alpha > 0.0 && bc.absorbing.alpha < 1.0)) {
          throw ConfigError(where + "absorbing alpha must lie in (0, 1)");
        }
        break;
      case BoundaryKind::Resistive:
        if (!(bc.resistive.rho_w > 0.0) || !(bc.resistive.c_w > 0.0)) {
          throw ConfigError(where + "resistive wall needs positive rho_w and c_w");
        }
        if (!(bc.resistive.theta >= 0.0 && bc.resistive.theta <= std::numbers::pi / 2)) {
          throw ConfigError(where + "resistive theta must lie in [0, pi/2]");
        }
        break;
      case BoundaryKind::Inlet:
        if (!(bc.inlet.frequency > 0.0) || !(bc.inlet.cycles > 0.0)) {
          throw ConfigError(where + "inlet needs positive frequency and cycle count");
        }
        break;
      case BoundaryKind::Reflecting:
        break;
    }
  }
  const int np = quadrature.num_points();
  point_condition_.resize(static_cast<std::size_t>(np));
  for (int p = 0; p < np; ++p) point_condition_[static_cast<std::size_t>(p)] = &conditions_.at(quadrature.tag(p));
  reset_filters();
}

bool BoundaryModel::has_filters() const {
  return std::any_of(conditions_.begin(), conditions_.end(), [](const auto& kv) {
    return kv.second.kind == BoundaryKind::Absorbing && kv.second.absorbing.filter;
  });
}

bool BoundaryModel::has_per_stage_filters() const {
  return std::any_of(conditions_.begin(), conditions_.end(), [](const auto& kv) {
    return kv.second.kind == BoundaryKind::Absorbing && kv.second.absorbing.filter && kv.second.absorbing.per_stage;
  });
}

void BoundaryModel::reset_filters() {
  const int np = quadrature_->num_points();
  filters_.resize(static_cast<std::size_t>(np));
  for (int p = 0; p < np; ++p) filters_[static_cast<std::size_t>(p)] = filter_init(quadrature_->normals.col(p));
}

void BoundaryModel::flux_values(const Eigen::Matrix3Xd& traces, double t, Eigen::VectorXd& phi) const {
  const int np = quadrature_->num_points();
  phi.resize(np);
  for (int p = 0; p < np; ++p) {
    const auto& bc = *point_condition_[static_cast<std::size_t>(p)];
    const double rho = traces(0, p);
    switch (bc.kind) {
      case BoundaryKind::Inlet:
        phi(p) = inlet_profile(bc.inlet, quadrature_->points(0, p), quadrature_->points(1, p), t);
        break;
      case BoundaryKind::Reflecting:
        phi(p) = 0.0;
        break;
      case BoundaryKind::Absorbing:
        phi(p) = absorbing_flux(rho, bc.absorbing.filter ? filters_[static_cast<std::size_t>(p)].eta : 1.0, c_,
                                rho_bar_);
        break;
      case BoundaryKind::Resistive:
        phi(p) = resistive_flux(rho, bc.resistive.theta, bc.resistive.rho_w, bc.resistive.c_w, c_);
        break;
    }
  }
}

void BoundaryModel::update_filters(const Eigen::Matrix3Xd& traces, bool stage) {
  const int np = quadrature_->num_points();
  for (int p = 0; p < np; ++p) {
    const auto& bc = *point_condition_[static_cast<std::size_t>(p)];
    if (bc.kind != BoundaryKind::Absorbing || !bc.absorbing.filter || bc.absorbing.per_stage != stage) continue;
    filter_update(filters_[static_cast<std::size_t>(p)], traces.block<2, 1>(1, p), quadrature_->normals.col(p),
                  bc.absorbing.alpha);
  }
}

}  // namespace rkdg
