#include "rkdg/basis.hpp"

#include <stdexcept>

namespace rkdg {

std::vector<std::pair<int, int>> mode_indices_2d(int order) {
  std::vector<std::pair<int, int>> modes;
  modes.reserve(num_modes_2d(order));
  for (int degree = 0; degree <= order; ++degree) {
    for (int i = 0; i <= degree; ++i) modes.emplace_back(i, degree - i);
  }
  return modes;
}

std::vector<std::array<int, 3>> mode_indices_3d(int order) {
  std::vector<std::array<int, 3>> modes;
  modes.reserve(num_modes_3d(order));
  for (int degree = 0; degree <= order; ++degree) {
    for (int i = 0; i <= degree; ++i) {
      for (int j = 0; i + j <= degree; ++j) modes.push_back({i, j, degree - i - j});
    }
  }
  return modes;
}

Eigen::MatrixXd tabulate_values(int order, const Eigen::Matrix2Xd& points) {
  const auto modes = mode_indices_2d(order);
  Eigen::MatrixXd values(points.cols(), static_cast<Eigen::Index>(modes.size()));
  for (Eigen::Index q = 0; q < points.cols(); ++q) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      values(q, static_cast<Eigen::Index>(m)) =
          dubiner2d_value(modes[m].first, modes[m].second, points(0, q), points(1, q));
    }
  }
  return values;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> tabulate_gradients(int order,
                                                               const Eigen::Matrix2Xd& points) {
  const auto modes = mode_indices_2d(order);
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd dxi(points.cols(), n), deta(points.cols(), n);
  for (Eigen::Index q = 0; q < points.cols(); ++q) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const auto g = dubiner2d_gradient(modes[m].first, modes[m].second, points(0, q), points(1, q));
      dxi(q, m) = g[0];
      deta(q, m) = g[1];
    }
  }
  return {dxi, deta};
}

Eigen::MatrixXd tabulate_values_3d(int order, const Eigen::Matrix3Xd& points) {
  const auto modes = mode_indices_3d(order);
  Eigen::MatrixXd values(points.cols(), static_cast<Eigen::Index>(modes.size()));
  for (Eigen::Index q = 0; q < points.cols(); ++q) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto& [i, j, k] = modes[m];
      values(q, static_cast<Eigen::Index>(m)) =
          dubiner3d_eval(i, j, k, points(0, q), points(1, q), points(2, q));
    }
  }
  return values;
}

ElementSpace::ElementSpace(int order, TriangleRule rule)
    : order_(order),
      num_modes_(num_modes_2d(order)),
      modes_(mode_indices_2d(order)),
      rule_(std::move(rule)) {
  if (order < 1) throw std::invalid_argument("ElementSpace: polynomial order must be >= 1");
  values_ = tabulate_values(order_, rule_.nodes);
  std::tie(grad_xi_, grad_eta_) = tabulate_gradients(order_, rule_.nodes);
}

ElementSpace::ElementSpace(int order)
    : ElementSpace(order, triangle_rule(2 * order + 1)) {}

Eigen::MatrixXd ElementSpace::gram() const {
  return values_.transpose() * rule_.weights.asDiagonal() * values_;
}

Eigen::RowVectorXd ElementSpace::evaluate(const Eigen::Vector2d& ref) const {
  Eigen::RowVectorXd row(num_modes_);
  for (int m = 0; m < num_modes_; ++m) {
    row(m) = dubiner2d_value(modes_[m].first, modes_[m].second, ref.x(), ref.y());
  }
  return row;
}

}  // namespace rkdg
