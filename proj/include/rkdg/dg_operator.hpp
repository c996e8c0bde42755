#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rkdg/background.hpp"
#include "rkdg/basis.hpp"
#include "rkdg/block_sparse.hpp"
#include "rkdg/mesh.hpp"
#include "rkdg/quadrature.hpp"

namespace rkdg {

inline constexpr int kNumFields = 3;  // rho, u1, u2

/// Raised when the discrete solution leaves the representable range.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, int element) : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

struct OperatorOptions {
  /// Edge points; defaults to order + 1.
  int edge_points = 0;
  /// Use |u.n| + c pointwise in the flux penalty instead of the global bound.
  bool local_lambda = false;
  std::optional<double> lambda_override;
};

/// Reference basis traces on the three local edges. Edge k runs from
/// reference vertex k to vertex k+1; `forward` is sampled at the edge
/// rule nodes s, `reverse` at 1 - s. Both are (#points x #modes).
struct EdgeTraces {
  EdgeRule rule;
  std::array<Eigen::MatrixXd, 3> forward;
  std::array<Eigen::MatrixXd, 3> reverse;
};

EdgeTraces make_edge_traces(int order, const EdgeRule& rule);

/// Boundary quadrature points, edge-major: point p lives on boundary edge
/// p / points_per_edge.
struct BoundaryQuadrature {
  std::vector<BoundaryEdge> edges;
  int points_per_edge = 0;
  Eigen::Matrix2Xd points;
  Eigen::Matrix2Xd normals;  // outward
  Eigen::VectorXd weights;   // physical, include edge length
  Eigen::VectorXd normal_velocity;  // background u.n

  int num_points() const { return static_cast<int>(weights.size()); }
  int tag(int point) const { return edges[static_cast<std::size_t>(point / points_per_edge)].tag; }
};

/// Diagonal of the mass matrix: |det J_K| for every field and mode of K.
Eigen::VectorXd assemble_mass(const Mesh& mesh, const ElementSpace& space);

/// Entrywise reciprocal of the mass diagonal.
Eigen::VectorXd invert_mass(const Eigen::VectorXd& mass_diag);
/// In-place variant writing into preallocated storage.
void invert_mass(const Eigen::VectorXd& mass_diag, Eigen::VectorXd& out);

/// max over internal-edge quadrature points of |u_bar . n| + c; c when the
/// mesh has no internal edge.
double lax_friedrichs_lambda(const BackgroundFlow& flow, const Mesh& mesh, const EdgeConnectivity& conn,
                             const EdgeRule& rule);

/// Flux Jacobian F1 n1 + F2 n2 for (rho, u1, u2).
Eigen::Matrix3d normal_flux_matrix(double rho_bar, double c, double un, const Eigen::Vector2d& n);

/// Semi-discrete operator M u' + S0 u + b(Phi) = 0.
class DGOperator {
 public:
  DGOperator(const Mesh& mesh, const EdgeConnectivity& conn, const ElementSpace& space,
             const BackgroundFlow& flow, const OperatorOptions& options = {});

  int num_elements() const { return num_elements_; }
  int num_modes() const { return num_modes_; }
  Eigen::Index state_size() const { return static_cast<Eigen::Index>(kNumFields) * num_elements_ * num_modes_; }
  Eigen::Index index(int field, int element, int mode) const {
    return (static_cast<Eigen::Index>(field) * num_elements_ + element) * num_modes_ + mode;
  }

  const Eigen::VectorXd& mass_diag() const { return mass_; }
  const Eigen::VectorXd& inverse_mass() const { return inverse_mass_; }
  /// Element-local part of S0: volume terms plus each element's own edge traces.
  const BlockSparseMatrix& self_blocks() const { return self_; }
  /// Full S0 including neighbor coupling, assembled on request.
  BlockSparseMatrix assemble_interior() const;
  /// Bytes held by the stored operator (self blocks plus edge coefficients).
  std::size_t storage_bytes() const;
  double lambda_max() const { return lambda_; }
  double rho_bar() const { return rho_bar_; }
  double sound_speed() const { return c_; }
  const BoundaryQuadrature& boundary() const { return boundary_; }
  const EdgeTraces& traces() const { return traces_; }

  double assembly_seconds() const { return assembly_seconds_; }
  double mass_inversion_seconds() const { return mass_inversion_seconds_; }
  /// Background samples that exceeded the sound speed during assembly.
  int supersonic_points() const { return supersonic_points_; }

  /// Interior traces (rho, u1, u2) at every boundary quadrature point.
  void boundary_traces(const Eigen::VectorXd& state, Eigen::Matrix3Xd& out) const;

  /// y += b(Phi): the rho-row load rho_bar * int Phi phi_m over the boundary.
  void add_boundary_load(const Eigen::VectorXd& phi, Eigen::VectorXd& y) const;

  /// y += neighbor coupling part of S0 applied to state.
  void add_coupling(const Eigen::VectorXd& state, Eigen::VectorXd& y) const;

  /// out = -M^{-1} (S0 state + b(Phi)).
  void apply_rhs(const Eigen::VectorXd& state, const Eigen::VectorXd& phi, Eigen::VectorXd& out) const;

 private:
  int num_elements_ = 0;
  int num_modes_ = 0;
  double rho_bar_ = 0.0;
  double c_ = 0.0;
  double lambda_ = 0.0;
  Eigen::VectorXd mass_;
  Eigen::VectorXd inverse_mass_;
  BlockSparseMatrix self_;
  std::vector<InternalEdge> internal_edges_;
  /// Per internal edge point, weighted 3x3 coefficients: [2 q] acts on the
  /// plus trace in minus rows, [2 q + 1] on the minus trace in plus rows.
  std::vector<Eigen::Matrix3d, Eigen::aligned_allocator<Eigen::Matrix3d>> coupling_;
  EdgeTraces traces_;
  BoundaryQuadrature boundary_;
  double assembly_seconds_ = 0.0;
  double mass_inversion_seconds_ = 0.0;
  int supersonic_points_ = 0;
};

Eigen::VectorXd apply_rhs(const DGOperator& op, const Eigen::VectorXd& state, const Eigen::VectorXd& phi);

/// Throws BlowUpError naming the first element with a non-finite or
/// oversized coefficient.
void check_state(const Eigen::VectorXd& state, int num_elements, int num_modes, double limit = 1e12);

/// Writes S0 in Matrix Market coordinate format.
void write_matrix_market(const BlockSparseMatrix& matrix, const std::filesystem::path& path);

using FieldFunction = std::function<Eigen::Vector3d(const Eigen::Vector2d&)>;

/// L2 projection of (rho, u1, u2) onto the modal space using `rule`.
Eigen::VectorXd project(const Mesh& mesh, const ElementSpace& space, const FieldFunction& f,
                        const TriangleRule& rule);
Eigen::VectorXd project(const Mesh& mesh, const ElementSpace& space, const FieldFunction& f);

/// (rho, u1, u2) of element `element` at reference point `ref`.
Eigen::Vector3d evaluate_state(const Eigen::VectorXd& state, const ElementSpace& space, int num_elements,
                               int element, const Eigen::Vector2d& ref);

}  // namespace rkdg
