#include "rkdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkdg/basis.hpp"

namespace rkdg {

namespace {

// Orbit builder for fully symmetric triangle rules. Weights in the tables
// below are normalized to total 1 and scaled to the reference area here.
class SymmetricTriangleBuilder {
 public:
  void centroid(double w) { push(1.0 / 3.0, 1.0 / 3.0, w); }

  // Barycentric (a, a, 1-2a) and rotations.
  void orbit3(double a, double w) {
    const double c = 1.0 - 2.0 * a;
    push(a, a, w);
    push(a, c, w);
    push(c, a, w);
  }

  // Barycentric (a, b, 1-a-b) and all permutations.
  void orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    push(a, b, w);
    push(b, a, w);
    push(a, c, w);
    push(c, a, w);
    push(b, c, w);
    push(c, b, w);
  }

  TriangleRule build(int order) const {
    TriangleRule rule;
    rule.order = order;
    const auto n = static_cast<Eigen::Index>(w_.size());
    rule.nodes.resize(2, n);
    rule.weights.resize(n);
    for (Eigen::Index q = 0; q < n; ++q) {
      rule.nodes(0, q) = xi_[q];
      rule.nodes(1, q) = eta_[q];
      rule.weights(q) = 0.5 * w_[q];
    }
    return rule;
  }

 private:
  void push(double xi, double eta, double w) {
    xi_.push_back(xi);
    eta_.push_back(eta);
    w_.push_back(w);
  }
  std::vector<double> xi_, eta_, w_;
};

// Dunavant (1985) symmetric rules. Rules 3, 7 and 11 of that family carry a
// negative weight or exterior nodes and are not embedded.
TriangleRule dunavant(int degree) {
  SymmetricTriangleBuilder b;
  switch (degree) {
    case 1:
      b.centroid(1.0);
      break;
    case 2:
      b.orbit3(1.0 / 6.0, 1.0 / 3.0);
      break;
    case 4:
      b.orbit3(0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
      b.orbit3(0.09157621350977074345957146340220, 0.10995174365532186763832632490021);
      break;
    case 5:
      b.centroid(0.225);
      b.orbit3(0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
      b.orbit3(0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
      break;
    case 6:
      b.orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
      b.orbit3(0.06308901449150222834033160287082, 0.05084490637020681692093680910686);
      b.orbit6(0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
               0.08285107561837357519355345642044);
      break;
    case 8:
      b.centroid(0.14431560767778716825109111048906);
      b.orbit3(0.17056930775176020662229350149146, 0.10321737053471825028179155029212);
      b.orbit3(0.05054722831703097545842355059660, 0.03245849762319808031092592834178);
      b.orbit3(0.45929258829272315602881551449417, 0.09509163426728462479389610438858);
      b.orbit6(0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
               0.02723031417443499426484469007390);
      break;
    case 9:
      b.centroid(0.09713579628279609890744676309485);
      b.orbit3(0.48968251919873762778370692483619, 0.03133470022713983234393199080984);
      b.orbit3(0.43708959149293663726993036443535, 0.07782754100477543338465495857972);
      b.orbit3(0.18820353561903273024096128046733, 0.07964773892720910288013526957424);
      b.orbit3(0.04472951339445297061024247196780, 0.02557767565869810438673914467637);
      b.orbit6(0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
               0.04328353937728937728937728937729);
      break;
    case 10:
      b.centroid(0.090817990382754);
      b.orbit3(0.485577633383657, 0.036725957756467);
      b.orbit3(0.109481575485037, 0.045321059435528);
      b.orbit6(0.141707219414880, 0.307939838764121, 0.072757916845420);
      b.orbit6(0.025003534762686, 0.246672560639903, 0.028327242531057);
      b.orbit6(0.009540815400299, 0.066803251012200, 0.009421666963733);
      break;
    case 12:
      b.orbit3(0.488217389773805, 0.025731066440455);
      b.orbit3(0.439724392294460, 0.043692544538038);
      b.orbit3(0.271210385012116, 0.062858224217885);
      b.orbit3(0.127576145541586, 0.034796112930709);
      b.orbit3(0.021317350453210, 0.006166261051559);
      b.orbit6(0.115343494534698, 0.275713269685514, 0.040371557766381);
      b.orbit6(0.022838332222257, 0.281325580989940, 0.022356773202303);
      b.orbit6(0.025734050548330, 0.116251915907597, 0.017316231108659);
      break;
    case 13:
      b.centroid(0.052520923400802);
      b.orbit3(0.495048184939705, 0.011280145209330);
      b.orbit3(0.468716635109574, 0.031423518362454);
      b.orbit3(0.414521336801277, 0.047072502504194);
      b.orbit3(0.229399572042831, 0.047363586536355);
      b.orbit3(0.114424495196330, 0.031167529045794);
      b.orbit3(0.024811391363459, 0.007975771465074);
      b.orbit6(0.094853828379579, 0.268794997058761, 0.036848402728732);
      b.orbit6(0.018100773278807, 0.291730066734288, 0.017401463303822);
      b.orbit6(0.022233076674090, 0.126357385491669, 0.015521786839045);
      break;
    case 14:
      b.orbit3(0.488963910362179, 0.021883581369429);
      b.orbit3(0.417644719340454, 0.032788353544125);
      b.orbit3(0.273477528308839, 0.051774104507292);
      b.orbit3(0.177205532412543, 0.042162588736993);
      b.orbit3(0.061799883090873, 0.014433699669777);
      b.orbit3(0.019390961248701, 0.004923403602400);
      b.orbit6(0.057124757403648, 0.172266687821356, 0.024665753212564);
      b.orbit6(0.092916249356972, 0.336861459796345, 0.038571510787061);
      b.orbit6(0.014646950055654, 0.298372882136258, 0.014436308113534);
      b.orbit6(0.001268330932872, 0.118974497696957, 0.005010228838501);
      break;
    default:
      throw std::logic_error("dunavant: degree " + std::to_string(degree) + " not embedded");
  }
  return b.build(degree);
}

int embedded_triangle_degree(int order) {
  switch (order) {
    case 3: return 4;
    case 7: return 8;
    case 11: return 12;
    default: return order;
  }
}

}  // namespace

TriangleRule triangle_rule(int order) {
  if (order < 1 || order > kMaxTriangleOrder) {
    throw std::out_of_range("triangle_rule: order " + std::to_string(order) +
                            " outside the embedded range [1, " +
                            std::to_string(kMaxTriangleOrder) + "]");
  }
  return dunavant(embedded_triangle_degree(order));
}

void gauss_jacobi(int npoints, double alpha, double beta, Eigen::VectorXd& nodes,
                  Eigen::VectorXd& weights) {
  if (npoints < 1) throw std::out_of_range("gauss_jacobi: npoints must be >= 1");
  const int n = npoints;
  // Golub-Welsch for starting values.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * k + ab;
    jac(k, k) = (k == 0 && std::abs(ab + 2.0) > 0)
                    ? (beta - alpha) / (ab + 2.0)
                    : (beta * beta - alpha * alpha) / (t * (t + 2.0));
    if (k + 1 < n) {
      const double k1 = k + 1.0;
      const double t1 = 2.0 * k1 + ab;
      const double off =
          std::sqrt(4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab) / (t1 * t1 * (t1 + 1.0) * (t1 - 1.0)));
      jac(k, k + 1) = off;
      jac(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  nodes = eig.eigenvalues();

  const double log_const = (ab + 1.0) * std::log(2.0) + std::lgamma(n + alpha + 1.0) +
                           std::lgamma(n + beta + 1.0) - std::lgamma(n + ab + 1.0) -
                           std::lgamma(n + 1.0);
  weights.resize(n);
  for (int q = 0; q < n; ++q) {
    double x = nodes(q);
    for (int it = 0; it < 8; ++it) {
      const double p = jacobi_eval(n, alpha, beta, x);
      const double dp = jacobi_deriv(n, alpha, beta, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-17) break;
    }
    nodes(q) = x;
    const double dp = jacobi_deriv(n, alpha, beta, x);
    weights(q) = std::exp(log_const) / ((1.0 - x * x) * dp * dp);
  }
}

EdgeRule edge_rule(int npoints) {
  if (npoints < 1 || npoints > kMaxEdgePoints) {
    throw std::out_of_range("edge_rule: npoints " + std::to_string(npoints) +
                            " outside [1, " + std::to_string(kMaxEdgePoints) + "]");
  }
  Eigen::VectorXd x, w;
  gauss_jacobi(npoints, 0.0, 0.0, x, w);
  EdgeRule rule;
  rule.order = 2 * npoints - 1;
  rule.nodes = (0.5 * (x.array() + 1.0)).matrix().transpose();
  rule.weights = 0.5 * w;
  return rule;
}

TetrahedronRule tetrahedron_rule(int order) {
  if (order < 1 || order > kMaxTetrahedronOrder) {
    throw std::out_of_range("tetrahedron_rule: order " + std::to_string(order) +
                            " outside [1, " + std::to_string(kMaxTetrahedronOrder) + "]");
  }
  const int n = (order + 2) / 2;  // Gauss exactness 2n-1 >= order
  Eigen::VectorXd x1, w1, x2, w2, x3, w3;
  gauss_jacobi(n, 0.0, 0.0, x1, w1);
  gauss_jacobi(n, 1.0, 0.0, x2, w2);
  gauss_jacobi(n, 2.0, 0.0, x3, w3);

  TetrahedronRule rule;
  rule.order = 2 * n - 1;
  rule.nodes.resize(3, n * n * n);
  rule.weights.resize(n * n * n);
  Eigen::Index q = 0;
  for (int k = 0; k < n; ++k) {
    const double nu = 0.5 * (1.0 + x3(k));
    for (int j = 0; j < n; ++j) {
      const double eta = 0.5 * (1.0 + x2(j)) * (1.0 - nu);
      for (int i = 0; i < n; ++i) {
        const double xi = 0.5 * (1.0 + x1(i)) * (1.0 - eta - nu);
        rule.nodes.col(q) << xi, eta, nu;
        // (1-x)^alpha weights on [-1,1] map to [0,1] with factors 2^-(alpha+1).
        rule.weights(q) = w1(i) / 2.0 * w2(j) / 4.0 * w3(k) / 8.0;
        ++q;
      }
    }
  }
  return rule;
}

}  // namespace rkdg
