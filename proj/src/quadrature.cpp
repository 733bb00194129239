#include "dpp/quadrature.hpp"

#include <cmath>

namespace dpp {

void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes,
                    Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    nodes[i] = xm - xl * x;
    nodes[n - 1 - i] = xm + xl * x;
    weights[i] = 2.0 * xl / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

namespace {

void axis_rule(const Domain& dom, int axis, int order, Eigen::VectorXd& nodes,
               Eigen::VectorXd& weights) {
  const double a = dom.lower()[axis], b = dom.upper()[axis];
  if (dom.periodic_axis(axis)) {
    // trapezoid on a periodic interval: equally spaced, equal weights
    nodes.resize(order);
    weights.setConstant(order, (b - a) / order);
    for (int i = 0; i < order; ++i) nodes[i] = a + (b - a) * i / order;
  } else {
    gauss_legendre(order, a, b, nodes, weights);
  }
}

}  // namespace

QuadratureRule domain_quadrature(const Domain& dom, int order) {
  QuadratureRule q;
  const int d = dom.dimension();
  if (dom.shape() == Domain::Shape::Ball && d == 2) {
    // polar grid: Gauss-Legendre in radius, trapezoid in angle
    Eigen::VectorXd rn, rw;
    gauss_legendre(order, 0.0, dom.radius(), rn, rw);
    const int na = 2 * order;
    q.nodes.resize(order * na, 2);
    q.weights.resize(order * na);
    const double dth = 2 * M_PI / na;
    int k = 0;
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < na; ++j, ++k) {
        const double th = j * dth;
        q.nodes(k, 0) = dom.center()[0] + rn[i] * std::cos(th);
        q.nodes(k, 1) = dom.center()[1] + rn[i] * std::sin(th);
        q.weights[k] = rw[i] * rn[i] * dth;
      }
    return q;
  }
  if (dom.shape() == Domain::Shape::Ball && d == 1) {
    Eigen::VectorXd n1, w1;
    gauss_legendre(order, dom.center()[0] - dom.radius(),
                   dom.center()[0] + dom.radius(), n1, w1);
    q.nodes = n1;
    q.weights = w1;
    return q;
  }
  if (dom.shape() == Domain::Shape::Ball)
    throw ParameterError("ball quadrature implemented for d <= 2");

  // Box: tensor product over axes
  std::vector<Eigen::VectorXd> nodes(d), weights(d);
  long total = 1;
  for (int a = 0; a < d; ++a) {
    axis_rule(dom, a, order, nodes[a], weights[a]);
    total *= nodes[a].size();
  }
  q.nodes.resize(total, d);
  q.weights.resize(total);
  std::vector<int> idx(d, 0);
  for (long k = 0; k < total; ++k) {
    double w = 1;
    for (int a = 0; a < d; ++a) {
      q.nodes(k, a) = nodes[a][idx[a]];
      w *= weights[a][idx[a]];
    }
    q.weights[k] = w;
    for (int a = 0; a < d; ++a) {
      if (++idx[a] < nodes[a].size()) break;
      idx[a] = 0;
    }
  }
  return q;
}

double integrate(const QuadratureRule& q,
                 const std::function<double(const Point&)>& f) {
  double s = 0;
  for (int i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.node(i));
  return s;
}

}  // namespace dpp
