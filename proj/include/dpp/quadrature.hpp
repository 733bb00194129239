#ifndef DPP_QUADRATURE_HPP
#define DPP_QUADRATURE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dpp/domain.hpp"

namespace dpp {

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes,
                    Eigen::VectorXd& weights);

/// Quadrature rule over a compact domain: nodes (rows) and weights for the
/// Lebesgue measure. Boxes use tensor Gauss-Legendre, periodic axes use the
/// trapezoid rule, 2-D balls use a polar grid.
struct QuadratureRule {
  Eigen::MatrixXd nodes;    // n x d
  Eigen::VectorXd weights;  // n

  int size() const { return static_cast<int>(weights.size()); }
  Point node(int i) const { return nodes.row(i).transpose(); }
};

QuadratureRule domain_quadrature(const Domain& dom, int order_per_axis = 64);

double integrate(const QuadratureRule& q,
                 const std::function<double(const Point&)>& f);

}  // namespace dpp

#endif
