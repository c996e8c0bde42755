#pragma once

#include <Eigen/Dense>

namespace rkdg {

/// Quadrature rule on a reference simplex of dimension `Dim`.
///
/// Nodes are stored column-wise in reference coordinates. Weights are
/// scaled to the reference measure: 1 for the unit interval [0,1], 1/2 for
/// the triangle {xi, eta >= 0, xi + eta <= 1} and 1/6 for the tetrahedron.
template <int Dim>
struct QuadratureRule {
  Eigen::Matrix<double, Dim, Eigen::Dynamic> nodes;
  Eigen::VectorXd weights;
  int order = 0;  // polynomial exactness

  Eigen::Index size() const { return weights.size(); }
  Eigen::Matrix<double, Dim, 1> node(Eigen::Index q) const { return nodes.col(q); }
};

using EdgeRule = QuadratureRule<1>;
using TriangleRule = QuadratureRule<2>;
using TetrahedronRule = QuadratureRule<3>;

inline constexpr int kMaxTriangleOrder = 14;
inline constexpr int kMaxEdgePoints = 12;
inline constexpr int kMaxTetrahedronOrder = 8;

/// Symmetric interior Gauss rule on the reference triangle with exactness
/// at least `order` (1 <= order <= 14). Orders whose published rule has a
/// negative weight or an exterior node are served by the next exact rule.
/// Throws std::out_of_range outside the tabulated range.
TriangleRule triangle_rule(int order);

/// Gauss-Legendre rule with `npoints` nodes on [0, 1], exactness 2n-1.
EdgeRule edge_rule(int npoints);

/// Interior positive rule on the reference tetrahedron (collapsed
/// Gauss-Jacobi product), exactness at least `order` (1 <= order <= 8).
TetrahedronRule tetrahedron_rule(int order);

/// Gauss-Jacobi nodes and weights on [-1, 1] for the weight
/// (1-x)^alpha (1+x)^beta. Nodes are polished by Newton iteration.
void gauss_jacobi(int npoints, double alpha, double beta, Eigen::VectorXd& nodes,
                  Eigen::VectorXd& weights);

}  // namespace rkdg
