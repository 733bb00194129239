#include "dpp/calculus.hpp"

#include <cmath>
#include <limits>

namespace dpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Interaction matrix of the configuration: J for generic kernels, K for
// projection kernels (Janossy branch).
Eigen::MatrixXcd interaction_matrix(const SpectralKernel& k,
                                    const PointConfiguration& cfg) {
  return k.is_projection() ? kernel_matrix(k, cfg) : j_matrix(k, cfg);
}

Eigen::VectorXcd interaction_grad_x(const SpectralKernel& k, const Point& x,
                                    const Point& y) {
  return k.is_projection() ? kernel_grad_x(k, x, y) : j_kernel_grad_x(k, x, y);
}

int nearest_pair_index(const PointConfiguration& cfg, const Domain& dom) {
  int best = -1;
  double dmin = kInf;
  for (int i = 0; i < cfg.size(); ++i)
    for (int j = i + 1; j < cfg.size(); ++j) {
      const double d = dom.distance(cfg.point(i), cfg.point(j));
      if (d < dmin) {
        dmin = d;
        best = j;
      }
    }
  return best;
}

}  // namespace

Potential potential_u(const SpectralKernel& k, const PointConfiguration& cfg) {
  Potential u;
  if (cfg.size() > k.rank() ||
      (k.is_projection() && cfg.size() != k.rank())) {
    u.value = kInf;
    return u;
  }
  const DetValue d = hermitian_det(interaction_matrix(k, cfg));
  u.value = -d.log_value;  // -(-inf) = +inf marker on singular dets
  return u;
}

Point beta_field(const SpectralKernel& k, const Point& x) {
  const double r = k.rho().value(x);
  return k.rho().gradient(x) / r;
}

Eigen::MatrixXd drift(const SpectralKernel& k, const PointConfiguration& cfg) {
  const int n = cfg.size();
  const int d = cfg.dimension();
  Eigen::MatrixXd out(n, d);
  if (n == 0) return out;
  if (cfg.size() > k.rank() || (k.is_projection() && cfg.size() != k.rank()))
    throw InfinitePotentialError("configuration outside the support",
                                 nearest_pair_index(cfg, k.domain()));
  const Eigen::MatrixXcd m = interaction_matrix(k, cfg);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const DetValue det = hermitian_det(m);
  if (!(det.log_value > -kInf))
    throw InfinitePotentialError("singular interaction matrix",
                                 nearest_pair_index(cfg, k.domain()));
  const Eigen::MatrixXcd minv = lu.inverse();
  for (int i = 0; i < n; ++i) {
    const Point xi = cfg.point(i);
    // grad_i log det M = 2 Re sum_q Minv(q,i) d_a M(i,q)   (M Hermitian)
    Point g = Point::Zero(d);
    for (int q = 0; q < n; ++q) {
      const Eigen::VectorXcd gx = interaction_grad_x(k, xi, cfg.point(q));
      for (int a = 0; a < d; ++a) g[a] += 2.0 * (minv(q, i) * gx[a]).real();
    }
    out.row(i) = (beta_field(k, xi) + g).transpose();
  }
  return out;
}

double b_v(const SpectralKernel& k, const VectorField& v,
           const PointConfiguration& cfg) {
  double s = 0;
  for (int i = 0; i < cfg.size(); ++i) {
    const Point x = cfg.point(i);
    s += -beta_field(k, x).dot(v.value(x)) + v.divergence(x);
  }
  return s;
}

double directional_grad_u(const SpectralKernel& k, const VectorField& v,
                          const PointConfiguration& cfg) {
  const Eigen::MatrixXd dr = drift(k, cfg);
  double s = 0;
  for (int i = 0; i < cfg.size(); ++i) {
    const Point x = cfg.point(i);
    // grad_i U = beta(x_i) - drift_i
    s += (beta_field(k, x) - dr.row(i).transpose()).dot(v.value(x));
  }
  return s;
}

double divergence_op(const SpectralKernel& k, const VectorField& v,
                     const TestFunctional& G, const PointConfiguration& cfg) {
  const double gval = eval_functional(G, cfg);
  const double gdir = directional_grad(G, v, cfg);
  return -gdir + gval * (-b_v(k, v, cfg) + directional_grad_u(k, v, cfg));
}

double quasi_invariance_weight(const SpectralKernel& k, const FlowMap& flow,
                               const PointConfiguration& cfg) {
  const Domain& dom = k.domain();
  const FlowMap back = inverse(flow);
  double log_w = 0.0;
  PointConfiguration pre(cfg.dimension());
  for (int i = 0; i < cfg.size(); ++i) {
    const Point x = cfg.point(i);
    auto [y, jac] = flow_point_jacobian(back, dom, x);
    pre.add_point(y);
    log_w += std::log(k.rho().value(y) / k.rho().value(x)) + std::log(jac);
  }
  const DetValue num = hermitian_det(interaction_matrix(k, pre));
  const DetValue den = hermitian_det(interaction_matrix(k, cfg));
  if (!(den.log_value > -kInf))
    throw InfinitePotentialError("singular det at the configuration");
  if (!(num.log_value > -kInf)) return 0.0;
  return std::exp(log_w + num.log_value - den.log_value);
}

double apply_generator(const SpectralKernel& k, const TestFunctional& F,
                       const PointConfiguration& cfg) {
  const int n = cfg.size();
  if (n > F.count_cutoff()) return 0.0;  // F vanishes identically there
  if (n == 0) return 0.0;
  const int M = F.arity();
  const Eigen::VectorXd s = F.statistic_sums(cfg);
  const Eigen::VectorXd df = F.outer().gradient(s);
  const Eigen::MatrixXd d2f = F.outer().hessian(s);
  const Eigen::MatrixXd dr = drift(k, cfg);

  double h = 0;
  for (int i = 0; i < n; ++i) {
    const Point x = cfg.point(i);
    Point grad_i = Point::Zero(cfg.dimension());
    double lap_i = 0;
    std::vector<Point> phig(M);
    for (int m = 0; m < M; ++m) {
      phig[m] = F.statistic(m).gradient(x);
      grad_i += df[m] * phig[m];
      lap_i += df[m] * F.statistic(m).laplacian(x);
    }
    for (int m = 0; m < M; ++m)
      for (int l = 0; l < M; ++l)
        lap_i += d2f(m, l) * phig[m].dot(phig[l]);
    const Point beta = beta_field(k, x);
    const Point grad_u = beta - dr.row(i).transpose();
    h += -beta.dot(grad_i) - lap_i + grad_u.dot(grad_i);
  }
  return h;
}

double dirichlet_summand(const TestFunctional& F, const TestFunctional& G,
                         const PointConfiguration& cfg) {
  const Eigen::MatrixXd gf = grad_functional(F, cfg);
  const Eigen::MatrixXd gg = grad_functional(G, cfg);
  return (gf.array() * gg.array()).sum();
}

}  // namespace dpp
