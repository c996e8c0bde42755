#include "rkdg/dg_operator.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include <unsupported/Eigen/SparseExtra>

namespace rkdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::array<Eigen::Vector2d, 3> kRefVertices = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                                     Eigen::Vector2d(0, 1)};

void check_sample(const BackgroundSample& s, const Eigen::Vector2d& x) {
  if (!s.velocity.allFinite() || !s.velocity_gradient.allFinite() || !s.pressure_gradient.allFinite()) {
    throw std::runtime_error("non-finite background sample at (" + std::to_string(x.x()) + ", " +
                             std::to_string(x.y()) + ")");
  }
}

// local += sum_q w_q C_q (x) test_q trial_q^T, field block by field block.
void accumulate_edge(Eigen::MatrixXd& local, int n, const Eigen::MatrixXd& test, const Eigen::MatrixXd& trial,
                     const std::vector<Eigen::Matrix3d>& coeff, const Eigen::VectorXd& w) {
  const auto q_count = w.size();
  Eigen::VectorXd d(q_count);
  for (int fi = 0; fi < kNumFields; ++fi) {
    for (int fj = 0; fj < kNumFields; ++fj) {
      for (Eigen::Index q = 0; q < q_count; ++q) d(q) = w(q) * coeff[static_cast<std::size_t>(q)](fi, fj);
      if (d.isZero(0.0)) continue;
      local.block(fi * n, fj * n, n, n).noalias() += test.transpose() * d.asDiagonal() * trial;
    }
  }
}

void emit_blocks(BlockSparseMatrix::Builder& builder, const Eigen::MatrixXd& local, int n, int ne, int row_elem,
                 int col_elem) {
  for (int fi = 0; fi < kNumFields; ++fi) {
    for (int fj = 0; fj < kNumFields; ++fj) {
      builder.add(fi * ne + row_elem, fj * ne + col_elem, local.block(fi * n, fj * n, n, n));
    }
  }
}

}  // namespace

EdgeTraces make_edge_traces(int order, const EdgeRule& rule) {
  EdgeTraces t;
  t.rule = rule;
  const auto q = rule.size();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector2d a = kRefVertices[static_cast<std::size_t>(k)];
    const Eigen::Vector2d b = kRefVertices[static_cast<std::size_t>((k + 1) % 3)];
    Eigen::Matrix2Xd fwd(2, q), rev(2, q);
    for (Eigen::Index i = 0; i < q; ++i) {
      const double s = rule.nodes(0, i);
      fwd.col(i) = a + s * (b - a);
      rev.col(i) = a + (1.0 - s) * (b - a);
    }
    t.forward[static_cast<std::size_t>(k)] = tabulate_values(order, fwd);
    t.reverse[static_cast<std::size_t>(k)] = tabulate_values(order, rev);
  }
  return t;
}

Eigen::VectorXd assemble_mass(const Mesh& mesh, const ElementSpace& space) {
  const int ne = mesh.num_elements();
  const int n = space.num_modes();
  Eigen::VectorXd mass(static_cast<Eigen::Index>(kNumFields) * ne * n);
  for (int f = 0; f < kNumFields; ++f) {
    for (int e = 0; e < ne; ++e) {
      mass.segment((static_cast<Eigen::Index>(f) * ne + e) * n, n).setConstant(std::abs(affine_map(mesh, e).det));
    }
  }
  return mass;
}

Eigen::VectorXd invert_mass(const Eigen::VectorXd& mass_diag) { return mass_diag.cwiseInverse(); }

void invert_mass(const Eigen::VectorXd& mass_diag, Eigen::VectorXd& out) {
  out.resize(mass_diag.size());
  out = mass_diag.cwiseInverse();
}

Eigen::Matrix3d normal_flux_matrix(double rho_bar, double c, double un, const Eigen::Vector2d& n) {
  Eigen::Matrix3d a;
  a << un, rho_bar * n.x(), rho_bar * n.y(),
       c * c / rho_bar * n.x(), un, 0.0,
       c * c / rho_bar * n.y(), 0.0, un;
  return a;
}

double lax_friedrichs_lambda(const BackgroundFlow& flow, const Mesh& mesh, const EdgeConnectivity& conn,
                             const EdgeRule& rule) {
  double lambda = flow.sound_speed();
  for (const auto& edge : conn.internal_edges) {
    const Eigen::Vector2d x0 = mesh.vertices.col(edge.vertices[0]);
    const Eigen::Vector2d x1 = mesh.vertices.col(edge.vertices[1]);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d x = x0 + rule.nodes(0, q) * (x1 - x0);
      lambda = std::max(lambda, std::abs(flow.sample(x).velocity.dot(edge.normal)) + flow.sound_speed());
    }
  }
  return lambda;
}

DGOperator::DGOperator(const Mesh& mesh, const EdgeConnectivity& conn, const ElementSpace& space,
                       const BackgroundFlow& flow, const OperatorOptions& options)
    : num_elements_(mesh.num_elements()),
      num_modes_(space.num_modes()),
      rho_bar_(flow.rho_bar()),
      c_(flow.sound_speed()) {
  const auto start = Clock::now();
  const int ne = num_elements_;
  const int n = num_modes_;
  const int p = space.order();
  traces_ = make_edge_traces(p, edge_rule(options.edge_points > 0 ? options.edge_points : p + 1));
  const auto& erule = traces_.rule;
  const auto nq_edge = erule.size();

  // Background normal velocity at internal edge points, cached once.
  const auto nie = conn.internal_edges.size();
  std::vector<Eigen::VectorXd> edge_un(nie);
  lambda_ = c_;
  for (std::size_t i = 0; i < nie; ++i) {
    const auto& edge = conn.internal_edges[i];
    const Eigen::Vector2d x0 = mesh.vertices.col(edge.vertices[0]);
    const Eigen::Vector2d x1 = mesh.vertices.col(edge.vertices[1]);
    edge_un[i].resize(nq_edge);
    for (Eigen::Index q = 0; q < nq_edge; ++q) {
      const Eigen::Vector2d x = x0 + erule.nodes(0, q) * (x1 - x0);
      const auto s = flow.sample(x);
      check_sample(s, x);
      if (s.velocity.norm() >= c_) ++supersonic_points_;
      edge_un[i](q) = s.velocity.dot(edge.normal);
      lambda_ = std::max(lambda_, std::abs(edge_un[i](q)) + c_);
    }
  }
  if (options.lambda_override) lambda_ = *options.lambda_override;

  // Boundary tables.
  boundary_.edges = conn.boundary_edges;
  boundary_.points_per_edge = static_cast<int>(nq_edge);
  const auto nbp = static_cast<Eigen::Index>(conn.boundary_edges.size()) * nq_edge;
  boundary_.points.resize(2, nbp);
  boundary_.normals.resize(2, nbp);
  boundary_.weights.resize(nbp);
  boundary_.normal_velocity.resize(nbp);
  for (std::size_t b = 0; b < conn.boundary_edges.size(); ++b) {
    const auto& edge = conn.boundary_edges[b];
    const Eigen::Vector2d x0 = mesh.vertices.col(edge.vertices[0]);
    const Eigen::Vector2d x1 = mesh.vertices.col(edge.vertices[1]);
    for (Eigen::Index q = 0; q < nq_edge; ++q) {
      const auto k = static_cast<Eigen::Index>(b) * nq_edge + q;
      const Eigen::Vector2d x = x0 + erule.nodes(0, q) * (x1 - x0);
      const auto s = flow.sample(x);
      check_sample(s, x);
      if (s.velocity.norm() >= c_) ++supersonic_points_;
      boundary_.points.col(k) = x;
      boundary_.normals.col(k) = edge.normal;
      boundary_.weights(k) = erule.weights(q) * edge.length;
      boundary_.normal_velocity(k) = s.velocity.dot(edge.normal);
    }
  }

  // Which internal/boundary edge sits on each local edge.
  std::vector<std::array<int, 3>> local_edge(static_cast<std::size_t>(ne), {-1, -1, -1});
  for (std::size_t i = 0; i < nie; ++i) {
    const auto& edge = conn.internal_edges[i];
    local_edge[static_cast<std::size_t>(edge.minus)][static_cast<std::size_t>(edge.local_minus)] = static_cast<int>(i);
    local_edge[static_cast<std::size_t>(edge.plus)][static_cast<std::size_t>(edge.local_plus)] = static_cast<int>(i);
  }
  for (std::size_t b = 0; b < conn.boundary_edges.size(); ++b) {
    const auto& edge = conn.boundary_edges[b];
    local_edge[static_cast<std::size_t>(edge.element)][static_cast<std::size_t>(edge.local)] = -2 - static_cast<int>(b);
  }

  const auto& phi = space.values();
  const auto& gxi = space.grad_xi();
  const auto& geta = space.grad_eta();
  const auto& vrule = space.rule();
  const auto nq = vrule.size();
  const double rb = rho_bar_, c2 = c_ * c_;

  BlockSparseMatrix::Builder builder(kNumFields * ne, kNumFields * ne, n);
  Eigen::MatrixXd self(kNumFields * n, kNumFields * n);
  Eigen::MatrixXd gx(nq, n), gy(nq, n), adv(nq, n), wphi(nq, n);
  Eigen::VectorXd w(nq), div(nq), dpx(nq), dpy(nq), ew(nq_edge);
  std::array<Eigen::VectorXd, 4> gij;
  for (auto& g : gij) g.resize(nq);
  std::vector<Eigen::Matrix3d> coeff(static_cast<std::size_t>(nq_edge));
  const Eigen::Matrix3d identity = Eigen::Matrix3d::Identity();
  const auto lam_at = [&](double un) {
    return options.local_lambda && !options.lambda_override ? std::abs(un) + c_ : lambda_;
  };

  for (int e = 0; e < ne; ++e) {
    const auto map = affine_map(mesh, e);
    const auto& it = map.inverse_transpose;
    gx = it(0, 0) * gxi + it(0, 1) * geta;
    gy = it(1, 0) * gxi + it(1, 1) * geta;
    const Eigen::Matrix2Xd xq = map.to_physical(vrule.nodes);
    Eigen::VectorXd ux(nq), uy(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const Eigen::Vector2d x = xq.col(q);
      const auto s = flow.sample(x);
      check_sample(s, x);
      if (s.velocity.norm() >= c_) ++supersonic_points_;
      w(q) = vrule.weights(q) * std::abs(map.det);
      ux(q) = s.velocity.x();
      uy(q) = s.velocity.y();
      div(q) = s.divergence();
      gij[0](q) = s.velocity_gradient(0, 0);
      gij[1](q) = s.velocity_gradient(0, 1);
      gij[2](q) = s.velocity_gradient(1, 0);
      gij[3](q) = s.velocity_gradient(1, 1);
      dpx(q) = s.pressure_gradient.x();
      dpy(q) = s.pressure_gradient.y();
    }
    adv = ux.asDiagonal() * gx + uy.asDiagonal() * gy;
    wphi = w.asDiagonal() * phi;

    self.setZero();
    const auto blk = [&](int fi, int fj) { return self.block(fi * n, fj * n, n, n); };
    // rho row
    blk(0, 0).noalias() -= adv.transpose() * wphi;
    blk(0, 1).noalias() -= rb * gx.transpose() * wphi;
    blk(0, 2).noalias() -= rb * gy.transpose() * wphi;
    // momentum rows
    const Eigen::MatrixXd transport = adv.transpose() * wphi + phi.transpose() * (w.cwiseProduct(div)).asDiagonal() * phi;
    for (int i = 0; i < 2; ++i) {
      const auto& gi = i == 0 ? gx : gy;
      const auto& dp = i == 0 ? dpx : dpy;
      blk(1 + i, 0).noalias() -= (c2 / rb) * gi.transpose() * wphi;
      blk(1 + i, 0).noalias() -= phi.transpose() * (w.cwiseProduct(dp) / (rb * rb)).asDiagonal() * phi;
      blk(1 + i, 1 + i) -= transport;
      for (int j = 0; j < 2; ++j) {
        const auto& g = gij[static_cast<std::size_t>(2 * i + j)];
        if (g.isZero(0.0)) continue;
        blk(1 + i, 1 + j).noalias() += phi.transpose() * (w.cwiseProduct(g)).asDiagonal() * phi;
      }
    }

    // Edge terms acting on the element's own traces.
    for (int k = 0; k < 3; ++k) {
      const int id = local_edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
      if (id >= 0) {
        const auto& edge = conn.internal_edges[static_cast<std::size_t>(id)];
        const bool minus = edge.minus == e && edge.local_minus == k;
        for (Eigen::Index q = 0; q < nq_edge; ++q) {
          const double un = edge_un[static_cast<std::size_t>(id)](q);
          const Eigen::Matrix3d half_a = 0.5 * normal_flux_matrix(rb, c_, un, edge.normal);
          coeff[static_cast<std::size_t>(q)] = (minus ? half_a : Eigen::Matrix3d(-half_a)) + 0.5 * lam_at(un) * identity;
          ew(q) = erule.weights(q) * edge.length;
        }
        const Eigen::MatrixXd& t = minus ? traces_.forward[static_cast<std::size_t>(edge.local_minus)]
                                         : traces_.reverse[static_cast<std::size_t>(edge.local_plus)];
        accumulate_edge(self, n, t, t, coeff, ew);
      } else if (id <= -2) {
        const auto b = static_cast<std::size_t>(-2 - id);
        const auto& edge = conn.boundary_edges[b];
        for (Eigen::Index q = 0; q < nq_edge; ++q) {
          const auto k_pt = static_cast<Eigen::Index>(b) * nq_edge + q;
          Eigen::Matrix3d bn = normal_flux_matrix(rb, c_, boundary_.normal_velocity(k_pt), edge.normal);
          bn(0, 1) = 0.0;
          bn(0, 2) = 0.0;
          coeff[static_cast<std::size_t>(q)] = bn;
          ew(q) = boundary_.weights(k_pt);
        }
        const Eigen::MatrixXd& t = traces_.forward[static_cast<std::size_t>(k)];
        accumulate_edge(self, n, t, t, coeff, ew);
      }
    }

    emit_blocks(builder, self, n, ne, e, e);
  }
  self_ = std::move(builder).build();

  // Neighbor coupling coefficients, applied matrix-free.
  internal_edges_ = conn.internal_edges;
  coupling_.resize(nie * static_cast<std::size_t>(nq_edge) * 2);
  for (std::size_t i = 0; i < nie; ++i) {
    const auto& edge = conn.internal_edges[i];
    for (Eigen::Index q = 0; q < nq_edge; ++q) {
      const double un = edge_un[i](q);
      const double w_q = erule.weights(q) * edge.length;
      const Eigen::Matrix3d half_a = 0.5 * normal_flux_matrix(rb, c_, un, edge.normal);
      const auto k = (i * static_cast<std::size_t>(nq_edge) + static_cast<std::size_t>(q)) * 2;
      coupling_[k] = w_q * (half_a - 0.5 * lam_at(un) * identity);
      coupling_[k + 1] = w_q * (-half_a - 0.5 * lam_at(un) * identity);
    }
  }
  mass_ = assemble_mass(mesh, space);
  assembly_seconds_ = seconds_since(start);

  const auto inv_start = Clock::now();
  invert_mass(mass_, inverse_mass_);
  mass_inversion_seconds_ = seconds_since(inv_start);
}

void DGOperator::boundary_traces(const Eigen::VectorXd& state, Eigen::Matrix3Xd& out) const {
  const int n = num_modes_;
  const int ne = num_elements_;
  const int nq = boundary_.points_per_edge;
  out.resize(3, boundary_.num_points());
  for (std::size_t b = 0; b < boundary_.edges.size(); ++b) {
    const auto& edge = boundary_.edges[b];
    const auto& t = traces_.forward[static_cast<std::size_t>(edge.local)];
    for (int f = 0; f < kNumFields; ++f) {
      const auto coeffs = state.segment((static_cast<Eigen::Index>(f) * ne + edge.element) * n, n);
      out.row(f).segment(static_cast<Eigen::Index>(b) * nq, nq) = (t * coeffs).transpose();
    }
  }
}

void DGOperator::add_boundary_load(const Eigen::VectorXd& phi, Eigen::VectorXd& y) const {
  const int n = num_modes_;
  const int nq = boundary_.points_per_edge;
  for (std::size_t b = 0; b < boundary_.edges.size(); ++b) {
    const auto& edge = boundary_.edges[b];
    const auto seg = static_cast<Eigen::Index>(b) * nq;
    const Eigen::VectorXd wphi = boundary_.weights.segment(seg, nq).cwiseProduct(phi.segment(seg, nq));
    if (wphi.isZero(0.0)) continue;
    y.segment(static_cast<Eigen::Index>(edge.element) * n, n).noalias() +=
        rho_bar_ * traces_.forward[static_cast<std::size_t>(edge.local)].transpose() * wphi;
  }
}

void DGOperator::apply_rhs(const Eigen::VectorXd& state, const Eigen::VectorXd& phi, Eigen::VectorXd& out) const {
  if (state.size() != state_size()) throw std::invalid_argument("apply_rhs: state size mismatch");
  if (phi.size() != boundary_.num_points()) throw std::invalid_argument("apply_rhs: flux size mismatch");
  self_.multiply(state, out);
  add_coupling(state, out);
  add_boundary_load(phi, out);
  out = -out.cwiseProduct(inverse_mass_);
  if (!out.allFinite()) check_state(out, num_elements_, num_modes_);
}

void DGOperator::add_coupling(const Eigen::VectorXd& state, Eigen::VectorXd& y) const {
  const int n = num_modes_;
  const int ne = num_elements_;
  const auto nq = traces_.rule.size();
  Eigen::MatrixXd um(nq, kNumFields), up(nq, kNumFields), gm(nq, kNumFields), gp(nq, kNumFields);
  const auto seg = [&](const Eigen::VectorXd& v, int f, int e) {
    return v.segment((static_cast<Eigen::Index>(f) * ne + e) * n, n);
  };
  for (std::size_t i = 0; i < internal_edges_.size(); ++i) {
    const auto& edge = internal_edges_[i];
    const auto& tm = traces_.forward[static_cast<std::size_t>(edge.local_minus)];
    const auto& tp = traces_.reverse[static_cast<std::size_t>(edge.local_plus)];
    for (int f = 0; f < kNumFields; ++f) {
      um.col(f).noalias() = tm * seg(state, f, edge.minus);
      up.col(f).noalias() = tp * seg(state, f, edge.plus);
    }
    const auto* c = coupling_.data() + i * static_cast<std::size_t>(nq) * 2;
    for (Eigen::Index q = 0; q < nq; ++q) {
      gm.row(q).noalias() = (c[2 * q] * up.row(q).transpose()).transpose();
      gp.row(q).noalias() = (c[2 * q + 1] * um.row(q).transpose()).transpose();
    }
    for (int f = 0; f < kNumFields; ++f) {
      y.segment((static_cast<Eigen::Index>(f) * ne + edge.minus) * n, n).noalias() += tm.transpose() * gm.col(f);
      y.segment((static_cast<Eigen::Index>(f) * ne + edge.plus) * n, n).noalias() += tp.transpose() * gp.col(f);
    }
  }
}

BlockSparseMatrix DGOperator::assemble_interior() const {
  const int n = num_modes_;
  const int ne = num_elements_;
  const auto nq = traces_.rule.size();
  BlockSparseMatrix::Builder builder(kNumFields * ne, kNumFields * ne, n);
  for (int fi = 0; fi < kNumFields; ++fi) {
    for (int fj = 0; fj < kNumFields; ++fj) {
      for (int e = 0; e < ne; ++e) {
        if (const double* b = self_.find(fi * ne + e, fj * ne + e)) {
          builder.add(fi * ne + e, fj * ne + e, Eigen::Map<const Eigen::MatrixXd>(b, n, n));
        }
      }
    }
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nq);
  std::vector<Eigen::Matrix3d> to_minus(static_cast<std::size_t>(nq)), to_plus(static_cast<std::size_t>(nq));
  Eigen::MatrixXd block(kNumFields * n, kNumFields * n);
  for (std::size_t i = 0; i < internal_edges_.size(); ++i) {
    const auto& edge = internal_edges_[i];
    const auto& tm = traces_.forward[static_cast<std::size_t>(edge.local_minus)];
    const auto& tp = traces_.reverse[static_cast<std::size_t>(edge.local_plus)];
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto k = (i * static_cast<std::size_t>(nq) + static_cast<std::size_t>(q)) * 2;
      to_minus[static_cast<std::size_t>(q)] = coupling_[k];
      to_plus[static_cast<std::size_t>(q)] = coupling_[k + 1];
    }
    block.setZero();
    accumulate_edge(block, n, tm, tp, to_minus, ones);
    emit_blocks(builder, block, n, ne, edge.minus, edge.plus);
    block.setZero();
    accumulate_edge(block, n, tp, tm, to_plus, ones);
    emit_blocks(builder, block, n, ne, edge.plus, edge.minus);
  }
  return std::move(builder).build();
}

std::size_t DGOperator::storage_bytes() const {
  return self_.memory_bytes() + coupling_.size() * sizeof(Eigen::Matrix3d) +
         internal_edges_.size() * sizeof(InternalEdge);
}

Eigen::VectorXd apply_rhs(const DGOperator& op, const Eigen::VectorXd& state, const Eigen::VectorXd& phi) {
  Eigen::VectorXd out;
  op.apply_rhs(state, phi, out);
  return out;
}

void check_state(const Eigen::VectorXd& state, int num_elements, int num_modes, double limit) {
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const double v = state(i);
    if (!std::isfinite(v) || std::abs(v) > limit) {
      const auto per_field = static_cast<Eigen::Index>(num_elements) * num_modes;
      const int element = static_cast<int>((i % per_field) / num_modes);
      const int field = static_cast<int>(i / per_field);
      throw BlowUpError("blow-up in element " + std::to_string(element) + " (field " + std::to_string(field) +
                            ", coefficient " + std::to_string(v) + ")",
                        element);
    }
  }
}

void write_matrix_market(const BlockSparseMatrix& matrix, const std::filesystem::path& path) {
  if (!Eigen::saveMarket(matrix.to_sparse(), path.string())) {
    throw std::ios_base::failure("cannot write matrix market file " + path.string());
  }
}

Eigen::VectorXd project(const Mesh& mesh, const ElementSpace& space, const FieldFunction& f,
                        const TriangleRule& rule) {
  const int ne = mesh.num_elements();
  const int n = space.num_modes();
  const Eigen::MatrixXd phi = tabulate_values(space.order(), rule.nodes);
  Eigen::VectorXd out(static_cast<Eigen::Index>(kNumFields) * ne * n);
  Eigen::MatrixXd values(rule.size(), kNumFields);
  for (int e = 0; e < ne; ++e) {
    const auto map = affine_map(mesh, e);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      values.row(q) = f(map.to_physical(Eigen::Vector2d(rule.nodes.col(q)))).transpose();
    }
    // Orthonormal reference basis: the coefficient is the reference moment.
    const Eigen::MatrixXd moments = phi.transpose() * rule.weights.asDiagonal() * values;
    for (int fld = 0; fld < kNumFields; ++fld) {
      out.segment((static_cast<Eigen::Index>(fld) * ne + e) * n, n) = moments.col(fld);
    }
  }
  return out;
}

Eigen::VectorXd project(const Mesh& mesh, const ElementSpace& space, const FieldFunction& f) {
  return project(mesh, space, f, triangle_rule(std::min(2 * space.order() + 2, kMaxTriangleOrder)));
}

Eigen::Vector3d evaluate_state(const Eigen::VectorXd& state, const ElementSpace& space, int num_elements,
                               int element, const Eigen::Vector2d& ref) {
  const int n = space.num_modes();
  const Eigen::RowVectorXd phi = space.evaluate(ref);
  Eigen::Vector3d out;
  for (int f = 0; f < kNumFields; ++f) {
    out(f) = phi.dot(state.segment((static_cast<Eigen::Index>(f) * num_elements + element) * n, n));
  }
  return out;
}

}  // namespace rkdg
