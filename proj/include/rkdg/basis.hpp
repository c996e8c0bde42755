#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rkdg/quadrature.hpp"

namespace rkdg {

namespace detail {
inline void check_jacobi_indices(double alpha, double beta) {
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw std::domain_error("jacobi: indices must satisfy alpha, beta > -1");
  }
}
}  // namespace detail

/// Jacobi polynomial P_n^{alpha,beta}(x) by the three-term recurrence.
template <typename Scalar>
Scalar jacobi_eval(int n, Scalar alpha, Scalar beta, Scalar x) {
  detail::check_jacobi_indices(static_cast<double>(alpha), static_cast<double>(beta));
  if (n < 0) throw std::domain_error("jacobi: negative degree");
  if (n == 0) return Scalar(1);
  const Scalar ab = alpha + beta;
  Scalar p_prev = Scalar(1);
  Scalar p = (alpha + Scalar(1)) + (ab + Scalar(2)) * (x - Scalar(1)) / Scalar(2);
  for (int k = 2; k <= n; ++k) {
    const Scalar s = Scalar(2 * k) + ab;
    const Scalar a1 = Scalar(2 * k) * (Scalar(k) + ab) * (s - Scalar(2));
    const Scalar a2 = (s - Scalar(1)) * (alpha * alpha - beta * beta);
    const Scalar a3 = (s - Scalar(2)) * (s - Scalar(1)) * s;
    const Scalar a4 = Scalar(2) * (Scalar(k) + alpha - Scalar(1)) * (Scalar(k) + beta - Scalar(1)) * s;
    const Scalar next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
    p_prev = p;
    p = next;
  }
  return p;
}

/// d/dx P_n^{alpha,beta}(x) = (n+alpha+beta+1)/2 * P_{n-1}^{alpha+1,beta+1}(x).
template <typename Scalar>
Scalar jacobi_deriv(int n, Scalar alpha, Scalar beta, Scalar x) {
  detail::check_jacobi_indices(static_cast<double>(alpha), static_cast<double>(beta));
  if (n < 0) throw std::domain_error("jacobi: negative degree");
  if (n == 0) return Scalar(0);
  return (Scalar(n) + alpha + beta + Scalar(1)) / Scalar(2) *
         jacobi_eval(n - 1, alpha + Scalar(1), beta + Scalar(1), x);
}

/// Homogenized Jacobi polynomial H_n(a, s) = s^n P_n^{alpha,beta}(a / s).
///
/// The recurrence is division-free in s, so the value is a polynomial in
/// (a, s) and stays finite at the collapsed vertex s = 0.
template <typename Scalar>
Scalar jacobi_homogeneous(int n, Scalar alpha, Scalar beta, Scalar a, Scalar s) {
  if (n == 0) return Scalar(1);
  const Scalar ab = alpha + beta;
  Scalar h_prev = Scalar(1);
  Scalar h = (alpha + Scalar(1)) * s + (ab + Scalar(2)) * (a - s) / Scalar(2);
  for (int k = 2; k <= n; ++k) {
    const Scalar t = Scalar(2 * k) + ab;
    const Scalar a1 = Scalar(2 * k) * (Scalar(k) + ab) * (t - Scalar(2));
    const Scalar a2 = (t - Scalar(1)) * (alpha * alpha - beta * beta);
    const Scalar a3 = (t - Scalar(2)) * (t - Scalar(1)) * t;
    const Scalar a4 = Scalar(2) * (Scalar(k) + alpha - Scalar(1)) * (Scalar(k) + beta - Scalar(1)) * t;
    const Scalar next = ((a2 * s + a3 * a) * h - a4 * s * s * h_prev) / a1;
    h_prev = h;
    h = next;
  }
  return h;
}

/// Normalization of the 2D mode (i, j).
template <typename Scalar>
Scalar dubiner2d_constant(int i, int j) {
  using std::sqrt;
  return sqrt(Scalar(2 * (2 * i + 1) * (i + j + 1)));
}

/// Normalization of the 3D mode (i, j, k).
template <typename Scalar>
Scalar dubiner3d_constant(int i, int j, int k) {
  using std::sqrt;
  return sqrt(Scalar((2 * i + 2 * j + 2 * k + 3) * (2 * i + 2 * j + 2) * (2 * i + 1)));
}

/// Orthonormal Dubiner mode phi_{i,j} on the closed reference triangle.
///
/// Uses the homogenized collapsed-coordinate product, which equals
/// c_{ij} (1-eta)^i P_i(2 xi/(1-eta) - 1) P_j^{2i+1,0}(2 eta - 1) wherever
/// eta < 1 and extends continuously to the vertex (0, 1).
template <typename Scalar>
Scalar dubiner2d_value(int i, int j, Scalar xi, Scalar eta) {
  const Scalar s = Scalar(1) - eta;
  const Scalar a = Scalar(2) * xi - s;
  return dubiner2d_constant<Scalar>(i, j) * jacobi_homogeneous<Scalar>(i, Scalar(0), Scalar(0), a, s) *
         jacobi_eval<Scalar>(j, Scalar(2 * i + 1), Scalar(0), Scalar(2) * eta - Scalar(1));
}

/// Reference gradient (d/dxi, d/deta) of dubiner2d_value.
template <typename Scalar>
std::array<Scalar, 2> dubiner2d_gradient(int i, int j, Scalar xi, Scalar eta) {
  const Scalar s = Scalar(1) - eta;
  const Scalar a = Scalar(2) * xi - s;
  // Legendre case of the homogenized recurrence with derivatives carried
  // along; da/dxi = 2, da/deta = 1, ds/deta = -1.
  Scalar q_prev = 1, q = 1, dq_prev_x = 0, dq_prev_y = 0, dq_x = 0, dq_y = 0;
  if (i >= 1) {
    q = a;
    dq_x = 2;
    dq_y = 1;
  }
  for (int n = 1; n < i; ++n) {
    const Scalar c1 = Scalar(2 * n + 1) / Scalar(n + 1);
    const Scalar c2 = Scalar(n) / Scalar(n + 1);
    const Scalar next = c1 * a * q - c2 * s * s * q_prev;
    const Scalar next_x = c1 * (Scalar(2) * q + a * dq_x) - c2 * s * s * dq_prev_x;
    const Scalar next_y = c1 * (q + a * dq_y) - c2 * (Scalar(-2) * s * q_prev + s * s * dq_prev_y);
    q_prev = q;
    dq_prev_x = dq_x;
    dq_prev_y = dq_y;
    q = next;
    dq_x = next_x;
    dq_y = next_y;
  }
  const Scalar alpha = Scalar(2 * i + 1);
  const Scalar x = Scalar(2) * eta - Scalar(1);
  const Scalar r = jacobi_eval<Scalar>(j, alpha, Scalar(0), x);
  const Scalar dr = Scalar(2) * jacobi_deriv<Scalar>(j, alpha, Scalar(0), x);
  const Scalar c = dubiner2d_constant<Scalar>(i, j);
  return {c * dq_x * r, c * (dq_y * r + q * dr)};
}

/// phi_{i,j}(xi, eta) on the open collapsed chart; throws std::domain_error
/// when eta >= 1.
template <typename Scalar>
Scalar dubiner2d_eval(int i, int j, Scalar xi, Scalar eta) {
  if (!(eta < Scalar(1))) throw std::domain_error("dubiner2d: eta >= 1 is the collapsed vertex");
  return dubiner2d_value(i, j, xi, eta);
}

/// Gradient of phi_{i,j}; same domain as dubiner2d_eval.
template <typename Scalar>
std::array<Scalar, 2> dubiner2d_grad(int i, int j, Scalar xi, Scalar eta) {
  if (!(eta < Scalar(1))) throw std::domain_error("dubiner2d: eta >= 1 is the collapsed vertex");
  return dubiner2d_gradient(i, j, xi, eta);
}

/// Orthonormal 3D Dubiner mode phi_{i,j,k} on the reference tetrahedron.
/// Throws std::domain_error when a collapsed denominator is not positive.
template <typename Scalar>
Scalar dubiner3d_eval(int i, int j, int k, Scalar xi, Scalar eta, Scalar nu) {
  const Scalar s1 = Scalar(1) - eta - nu;
  const Scalar s2 = Scalar(1) - nu;
  if (!(s1 > Scalar(0)) || !(s2 > Scalar(0))) {
    throw std::domain_error("dubiner3d: collapsed-coordinate denominator is not positive");
  }
  const Scalar f1 = jacobi_homogeneous<Scalar>(i, Scalar(0), Scalar(0), Scalar(2) * xi - s1, s1);
  const Scalar f2 = jacobi_homogeneous<Scalar>(j, Scalar(2 * i + 1), Scalar(0), Scalar(2) * eta - s2, s2);
  const Scalar f3 = jacobi_eval<Scalar>(k, Scalar(2 * i + 2 * j + 2), Scalar(0), Scalar(2) * nu - Scalar(1));
  return dubiner3d_constant<Scalar>(i, j, k) * f1 * f2 * f3;
}

/// Number of modes of total degree <= order in 2D.
constexpr int num_modes_2d(int order) { return (order + 1) * (order + 2) / 2; }
/// Number of modes of total degree <= order in 3D.
constexpr int num_modes_3d(int order) { return (order + 1) * (order + 2) * (order + 3) / 6; }

/// Graded lexicographic list of 2D mode indices: (i+j) ascending, then i.
std::vector<std::pair<int, int>> mode_indices_2d(int order);
/// Graded lexicographic list of 3D mode indices.
std::vector<std::array<int, 3>> mode_indices_3d(int order);

/// Values (rows = points, cols = modes) of the 2D basis at reference points.
Eigen::MatrixXd tabulate_values(int order, const Eigen::Matrix2Xd& points);
/// Reference gradients at points: first = d/dxi, second = d/deta.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> tabulate_gradients(int order,
                                                               const Eigen::Matrix2Xd& points);
/// Values of the 3D basis at reference points.
Eigen::MatrixXd tabulate_values_3d(int order, const Eigen::Matrix3Xd& points);

/// Polynomial space P^order on the reference triangle together with basis
/// tabulations at the nodes of an attached volume rule.
class ElementSpace {
 public:
  ElementSpace(int order, TriangleRule rule);
  /// Attaches the default volume rule of exactness 2*order + 1.
  explicit ElementSpace(int order);

  int order() const { return order_; }
  int num_modes() const { return num_modes_; }
  const std::vector<std::pair<int, int>>& modes() const { return modes_; }
  const TriangleRule& rule() const { return rule_; }

  /// Basis values at the rule nodes, size (#nodes x num_modes).
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::MatrixXd& grad_xi() const { return grad_xi_; }
  const Eigen::MatrixXd& grad_eta() const { return grad_eta_; }

  /// Gram matrix of the tabulated basis under the attached rule.
  Eigen::MatrixXd gram() const;

  /// Basis values at one reference point of the closed triangle.
  Eigen::RowVectorXd evaluate(const Eigen::Vector2d& ref) const;

 private:
  int order_;
  int num_modes_;
  std::vector<std::pair<int, int>> modes_;
  TriangleRule rule_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd grad_xi_;
  Eigen::MatrixXd grad_eta_;
};

}  // namespace rkdg
